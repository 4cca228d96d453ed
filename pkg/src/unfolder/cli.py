"""Command-line front end.

Subcommands: check, unfold, run, trace, coverage, abstract, debug, serve.
Exit codes: 0 success, 1 violations or evaluation failures, 2 usage errors.
"""

import argparse
import json
import os
import sys

from .apps import (
    CataDiverged,
    GoalUndefined,
    abstract_fixpoint,
    answer,
    build_edt,
    coverage,
    goal_trace,
    new_session,
    next_question,
)
from .config import Config
from .engine import fixpoint, resolve_clean_mode
from .machine import normalize, ueval
from .parser import ParseError, parse_expr, parse_program
from .printer import expr_str, interp_json, interp_listing, trace_str
from .validate import validate_program


def _config(args) -> Config:
    cfg = Config()
    fuel_env = os.environ.get("UNFOLDER_FUEL")
    if fuel_env:
        cfg = cfg.with_(hnf_fuel=int(fuel_env), ueval_fuel=int(fuel_env),
                        small_step_fuel=int(fuel_env))
    if getattr(args, "fuel", None):
        cfg = cfg.with_(hnf_fuel=args.fuel, ueval_fuel=args.fuel,
                        small_step_fuel=args.fuel)
    if getattr(args, "defer_comparisons", False):
        cfg = cfg.with_(defer_comparisons=True)
    if getattr(args, "clean_mode", None):
        cfg = cfg.with_(clean_mode=args.clean_mode)
    return cfg


def _load(path):
    try:
        with open(path, encoding="utf-8") as handle:
            return parse_program(handle.read())
    except FileNotFoundError:
        print(f"error: no such file: {path}", file=sys.stderr)
        raise SystemExit(1)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        raise SystemExit(1)


def cmd_check(args):
    program = _load(args.file)
    cfg = _config(args)
    violations = validate_program(program, cfg)
    if args.json:
        print(json.dumps({"schema": 1, "violations": [
            {"kind": v.kind, "rule": v.rule, "detail": v.detail}
            for v in violations]}))
    else:
        for v in violations:
            print(v)
        if not violations:
            print(f"ok: {len(program.rules)} rule(s), no violations")
    return 1 if violations else 0


def cmd_unfold(args):
    from .engine import Interpretation, u_step

    program = _load(args.file)
    cfg = _config(args)
    # stepped by hand so an interrupt still emits what was computed
    mode = resolve_clean_mode(program, cfg)
    seq = [Interpretation.empty()]
    converged = False
    try:
        for _ in range(args.steps):
            nxt = u_step(program, seq[-1], cfg, mode=mode)
            if nxt.same_facts(seq[-1]):
                converged = True
                break
            seq.append(nxt)
    except KeyboardInterrupt:
        print("interrupted; emitting the completed steps", file=sys.stderr)
    if args.json:
        print(json.dumps({"schema": 1, "converged": converged,
                          "interpretations": [interp_json(i) for i in seq]}))
        return 0
    for interp in seq:
        print(f"I{interp.step}:")
        listing = interp_listing(interp, traces=args.traces,
                                 positions=args.trace_positions,
                                 bots=args.trace_bots)
        print(listing if listing else "(empty)")
        print()
    print(f"converged: {converged} (clean mode: "
          f"{resolve_clean_mode(program, cfg)})")
    return 0


def cmd_run(args):
    program = _load(args.file)
    cfg = _config(args)
    try:
        goal = parse_expr(args.goal, program, allow_bot=False)
    except ParseError as exc:
        print(f"parse error in goal: {exc}", file=sys.stderr)
        return 1
    seq, _ = fixpoint(program, args.steps, cfg)
    value = None
    used_step = None
    fuel_spent = 0
    for interp in seq[1:]:
        res = ueval(interp, goal, program.signature, cfg)
        fuel_spent += res.fuel_used
        good = res.bot_free_values()
        if good:
            value = good[0]
            used_step = interp.step
            break
    if value is None:
        print(f"goal stayed undefined within {args.steps} step(s)",
              file=sys.stderr)
        return 1
    verified = None
    if args.verify:
        nf = normalize(program, goal, args.strategy, cfg.small_step_fuel,
                       cfg, seed=args.seed)
        verified = nf == value
    if args.json:
        print(json.dumps({"schema": 1, "value": expr_str(value),
                          "step": used_step, "fuel": fuel_spent,
                          "verified": verified}))
    else:
        print(expr_str(value))
        if verified is not None:
            print("verify: " + ("OK" if verified else
                                "MISMATCH against small-step execution"))
    return 0 if (verified is None or verified) else 1


def cmd_trace(args):
    program = _load(args.file)
    cfg = _config(args)
    goal = parse_expr(args.goal, program, allow_bot=False)
    seq, _ = fixpoint(program, args.steps, cfg)
    rows = goal_trace(program, goal, seq[-1], cfg)
    if args.json:
        from .printer import trace_json

        print(json.dumps({"schema": 1, "traces": [
            {"value": expr_str(f.body), "trace": trace_json(t)}
            for f, t in rows]}))
        return 0
    if not rows:
        print("no derivation found")
        return 1
    for fact, trace in rows:
        print(f"{expr_str(fact.body)}  "
              f"{trace_str(trace, positions=args.trace_positions, bots=args.trace_bots)}")
    return 0


def cmd_coverage(args):
    program = _load(args.file)
    cfg = _config(args)
    report = coverage(program, args.steps, cfg)
    if args.json:
        print(json.dumps(report.to_json()))
    else:
        print(report.table())
    return 0


def cmd_abstract(args):
    path = args.spec or args.file
    program = _load(path)
    cfg = _config(args)
    if not program.cata_rules:
        print("error: the program has no cata: section", file=sys.stderr)
        return 1
    try:
        seq, converged = abstract_fixpoint(program, args.steps, cfg)
    except CataDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps({"schema": 1, "converged": converged,
                          "interpretations": [interp_json(i) for i in seq]}))
        return 0
    final = seq[-1]
    print(f"fixpoint after I{final.step} (converged: {converged})")
    print(interp_listing(final, traces=False, show_bot_facts=False))
    return 0


def cmd_debug(args):
    program = _load(args.file)
    cfg = _config(args)
    goal = parse_expr(args.goal, program, allow_bot=False)
    try:
        edt = build_edt(program, goal, args.steps, cfg)
    except GoalUndefined as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    session = new_session(edt)
    print("answer each question with y (correct), n (wrong) or q (quit)")
    while True:
        node_id = next_question(session)
        if node_id is None:
            break
        node = edt.node(node_id)
        sys.stdout.write(
            f"is {expr_str(node.call)} = {expr_str(node.value)} correct? "
            "[y/n/q] ")
        sys.stdout.flush()
        line = sys.stdin.readline()
        if not line or line.strip().lower() in ("q", "quit"):
            print("\nsession aborted")
            return 1
        verdict = "correct" if line.strip().lower() in ("y", "yes") \
            else "wrong"
        answer(session, node_id, verdict)
    if session.status == "blamed":
        print(f"Blamed: {session.blamed_rule}")
    elif session.status == "exonerated":
        print("No error found")
    else:
        print("undecided: answers exhausted without a verdict")
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    app = create_app(session_log=args.session_log, cfg=_config(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="unfolder",
        description="semantics workbench for guarded-rule functional "
                    "programs: unfolding, execution, debugging, coverage, "
                    "abstraction")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, steps_default=8):
        p.add_argument("--steps", type=int, default=steps_default,
                       help="interpretation step bound")
        p.add_argument("--fuel", type=int, default=None,
                       help="reduction fuel override")
        p.add_argument("--defer-comparisons", action="store_true",
                       help="keep ground comparisons symbolic (listing "
                            "fidelity mode)")
        p.add_argument("--clean-mode", choices=["auto", "optimized",
                                                "general"], default=None)
        p.add_argument("--json", action="store_true")
        p.add_argument("--trace-positions", action="store_true")
        p.add_argument("--trace-bots", action="store_true")

    p = sub.add_parser("check", help="validate a program")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("unfold", help="print the interpretation sequence")
    p.add_argument("file")
    p.add_argument("--no-traces", dest="traces", action="store_false")
    common(p)
    p.set_defaults(func=cmd_unfold)

    p = sub.add_parser("run", help="evaluate a goal by unfolding")
    p.add_argument("goal")
    p.add_argument("file")
    p.add_argument("--verify", action="store_true",
                   help="cross-check with the small-step interpreter")
    p.add_argument("--strategy", choices=["lazy", "innermost", "random"],
                   default="lazy")
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("trace", help="show the derivation traces of a goal")
    p.add_argument("goal")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("coverage", help="rule coverage and a small test set")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("abstract", help="abstract interpretation fixpoint")
    p.add_argument("file", nargs="?")
    p.add_argument("--spec", help="program file holding the cata: section")
    common(p)
    p.set_defaults(func=cmd_abstract)

    p = sub.add_parser("debug", help="interactive declarative debugging")
    p.add_argument("goal")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_debug)

    p = sub.add_parser("serve", help="start the debugging HTTP service")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--session-log", default=None)
    common(p)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "abstract" and not (args.file or args.spec):
        parser.error("abstract needs a program file or --spec")
    if getattr(args, "steps", 1) < 1 or (getattr(args, "fuel", None) or 1) < 1:
        parser.error("bounds must be at least 1")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
