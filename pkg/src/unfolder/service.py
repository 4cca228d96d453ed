"""Session-oriented HTTP facade over debugging sessions.

Endpoints (all JSON):

    POST   /sessions                      {program, goal} -> {id, edt}
    GET    /sessions/{id}/question        -> {node|null, done}
    POST   /sessions/{id}/answer          {node, verdict} -> status
    GET    /sessions/{id}/blame           -> {rule|null}
    GET    /sessions/{id}/interpretations/{n} -> interpretation JSON
    DELETE /sessions/{id}

Sessions live in memory; an optional JSON-lines log replays them after a
restart.  Commands within one session are serialized; errors come back as
``{error, code}`` with a 4xx status.
"""

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from typing import Optional

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .apps import (
    AlreadyAnswered,
    DebugError,
    GoalUndefined,
    SessionClosed,
    answer,
    build_edt,
    new_session,
    next_question,
)
from .config import Config, DEFAULT
from .engine import fixpoint
from .parser import ParseError, parse_expr, parse_program
from .printer import expr_str, interp_json


class CreateSession(BaseModel):
    program: str
    goal: str


class Answer(BaseModel):
    node: int
    verdict: str


@dataclass
class Session:
    id: str
    program_text: str
    goal_text: str
    program: object
    debug: object
    created_at: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock)
    interp_cache: list = field(default_factory=list)


class ServiceState:
    def __init__(self, session_log: Optional[str] = None,
                 cfg: Config = DEFAULT, max_edt_steps: int = 16):
        self.sessions: dict = {}
        self.session_log = session_log
        self.cfg = cfg
        self.max_edt_steps = max_edt_steps
        self.registry = threading.Lock()

    def log(self, record: dict):
        if not self.session_log:
            return
        with open(self.session_log, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(record) + "\n")

    def create(self, program_text: str, goal_text: str,
               session_id: Optional[str] = None) -> Session:
        program = parse_program(program_text)
        goal = parse_expr(goal_text, program, allow_bot=False)
        edt = build_edt(program, goal, self.max_edt_steps, self.cfg)
        session = Session(
            id=session_id or uuid.uuid4().hex[:12],
            program_text=program_text,
            goal_text=goal_text,
            program=program,
            debug=new_session(edt),
        )
        with self.registry:
            self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Optional[Session]:
        return self.sessions.get(session_id)

    def replay(self):
        if not self.session_log:
            return
        try:
            with open(self.session_log, encoding="utf-8") as handle:
                lines = handle.readlines()
        except FileNotFoundError:
            return
        for line in lines:
            if not line.strip():
                continue
            record = json.loads(line)
            try:
                if record["op"] == "create":
                    self.create(record["program"], record["goal"],
                                session_id=record["id"])
                elif record["op"] == "answer":
                    session = self.get(record["id"])
                    if session:
                        answer(session.debug, record["node"],
                               record["verdict"])
                elif record["op"] == "delete":
                    self.sessions.pop(record["id"], None)
            except (DebugError, GoalUndefined, ParseError, KeyError):
                continue


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"error": message, "code": code})


def _question_payload(session: Session) -> dict:
    node_id = next_question(session.debug)
    done = session.debug.status != "in-progress"
    if node_id is None:
        return {"node": None, "done": done, "status": session.debug.status,
                "blamed": session.debug.blamed_rule or None}
    node = session.debug.edt.node(node_id)
    return {
        "node": {"id": node.id, "call": expr_str(node.call),
                 "value": expr_str(node.value), "rule": node.rule},
        "done": False,
        "status": session.debug.status,
        "blamed": None,
    }


def create_app(session_log: Optional[str] = None, cfg: Config = DEFAULT,
               state: Optional[ServiceState] = None) -> FastAPI:
    app = FastAPI(title="unfolder debug service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    svc = state or ServiceState(session_log=session_log, cfg=cfg)
    svc.replay()
    app.state.service = svc

    @app.post("/sessions")
    def create_session(body: CreateSession):
        try:
            session = svc.create(body.program, body.goal)
        except ParseError as exc:
            return _error(422, "parse_error", str(exc))
        except GoalUndefined as exc:
            return _error(422, "goal_undefined", str(exc))
        svc.log({"op": "create", "id": session.id, "program": body.program,
                 "goal": body.goal})
        return {"id": session.id,
                "edt": session.debug.edt.to_json(),
                "question": _question_payload(session)}

    @app.get("/sessions/{session_id}/question")
    def question(session_id: str):
        session = svc.get(session_id)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        return _question_payload(session)

    @app.post("/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: Answer):
        session = svc.get(session_id)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        with session.lock:
            try:
                answer(session.debug, body.node, body.verdict)
            except AlreadyAnswered as exc:
                return _error(409, "already_answered", str(exc))
            except SessionClosed as exc:
                return _error(409, "session_closed", str(exc))
            except DebugError as exc:
                return _error(404, "unknown_node", str(exc))
        svc.log({"op": "answer", "id": session_id, "node": body.node,
                 "verdict": body.verdict})
        return {"status": session.debug.status,
                "blamed": session.debug.blamed_rule or None,
                "question": _question_payload(session)}

    @app.get("/sessions/{session_id}/blame")
    def blame(session_id: str):
        session = svc.get(session_id)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        return {"rule": session.debug.blamed_rule or None,
                "status": session.debug.status}

    @app.get("/sessions/{session_id}/interpretations/{n}")
    def interpretation(session_id: str, n: int):
        session = svc.get(session_id)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        if n < 0 or n > 64:
            return _error(422, "bad_step", "step must lie in 0..64")
        with session.lock:
            while len(session.interp_cache) <= n:
                want = max(n, 1)
                seq, _ = fixpoint(session.program, want, svc.cfg)
                session.interp_cache = seq
                if len(seq) <= n:  # converged earlier; clamp
                    n = len(seq) - 1
                    break
        return interp_json(session.interp_cache[n])

    @app.delete("/sessions/{session_id}")
    def delete(session_id: str):
        session = svc.sessions.pop(session_id, None)
        if session is None:
            return _error(404, "unknown_session", f"no session {session_id}")
        svc.log({"op": "delete", "id": session_id})
        return {"deleted": session_id}

    return app
