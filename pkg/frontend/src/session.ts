// Session flow: a thin state machine over the service. All verdict and
// blame information comes from service responses; on any request failure
// the view state is left exactly as it was.

import {
  DebugServiceClient,
  EdtNodeJson,
  InterpretationJson,
  QuestionPayload,
  Verdict,
} from './api.js';

export type NodeVerdict = 'correct' | 'wrong' | 'unanswered';

export interface UiSessionView {
  sessionId: string | null;
  edt: EdtNodeJson | null;
  verdicts: Record<number, NodeVerdict>;
  question: QuestionPayload | null;
  status: string;
  blamed: string | null;
  interpretation: InterpretationJson | null;
  step: number;
  busy: boolean;
  error: string | null;
}

export function emptyView(): UiSessionView {
  return {
    sessionId: null,
    edt: null,
    verdicts: {},
    question: null,
    status: 'idle',
    blamed: null,
    interpretation: null,
    step: 0,
    busy: false,
    error: null,
  };
}

export class SessionFlow {
  view: UiSessionView = emptyView();

  constructor(private readonly client: DebugServiceClient) {}

  /** Create a session and load the first question. */
  async start(programText: string, goal: string): Promise<UiSessionView> {
    this.view = { ...emptyView(), busy: true };
    try {
      const created = await this.client.createSession(programText, goal);
      this.view = {
        ...this.view,
        sessionId: created.id,
        edt: created.edt.nodes,
        question: created.question,
        status: created.question.status,
        blamed: created.question.blamed,
        busy: false,
      };
    } catch (err) {
      this.view = { ...this.view, busy: false, error: String(err) };
    }
    return this.view;
  }

  /** Submit the user's verdict for the currently asked node. */
  async answer(verdict: Verdict): Promise<UiSessionView> {
    const { sessionId, question, busy } = this.view;
    if (!sessionId || !question || !question.node || busy) {
      return this.view;
    }
    const nodeId = question.node.id;
    this.view = { ...this.view, busy: true, error: null };
    try {
      const result = await this.client.answer(sessionId, nodeId, verdict);
      this.view = {
        ...this.view,
        verdicts: { ...this.view.verdicts, [nodeId]: verdict },
        question: result.question,
        status: result.status,
        blamed: result.blamed,
        busy: false,
      };
    } catch (err) {
      // a failed request freezes the session view
      this.view = { ...this.view, busy: false, error: String(err) };
    }
    return this.view;
  }

  /** Load an interpretation step for the browser panel. */
  async loadStep(step: number): Promise<UiSessionView> {
    const { sessionId } = this.view;
    if (!sessionId) {
      return this.view;
    }
    this.view = { ...this.view, busy: true, error: null };
    try {
      const interp = await this.client.interpretation(sessionId, step);
      this.view = {
        ...this.view,
        interpretation: interp,
        step: interp.step,
        busy: false,
      };
    } catch (err) {
      this.view = { ...this.view, busy: false, error: String(err) };
    }
    return this.view;
  }
}
