// Typed client for the debugging service. The UI computes nothing itself:
// every state transition below mirrors a service response verbatim.

export interface EdtNodeJson {
  id: number;
  call: string;
  value: string;
  rule: string;
  children: EdtNodeJson[];
}

export interface QuestionPayload {
  node: { id: number; call: string; value: string; rule: string } | null;
  done: boolean;
  status: string;
  blamed: string | null;
}

export interface CreateResponse {
  id: string;
  edt: { schema: number; nodes: EdtNodeJson };
  question: QuestionPayload;
}

export interface AnswerResponse {
  status: string;
  blamed: string | null;
  question: QuestionPayload;
}

export interface FactJson {
  head: string;
  guard: string;
  body: string;
  origin: string;
  trace: { rule: string; position: string }[];
}

export interface InterpretationJson {
  schema: number;
  step: number;
  facts: FactJson[];
  bot_facts: FactJson[];
}

export type Verdict = 'correct' | 'wrong';

export class ServiceError extends Error {
  constructor(readonly code: string, message: string) {
    super(message);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ServiceError(body.code ?? 'error', body.error ?? response.statusText);
  }
  return body as T;
}

export class DebugServiceClient {
  constructor(
    private readonly baseUrl: string = 'http://127.0.0.1:8765',
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  createSession(program: string, goal: string): Promise<CreateResponse> {
    return this.request('/sessions', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ program, goal }),
    });
  }

  question(sessionId: string): Promise<QuestionPayload> {
    return this.request(`/sessions/${sessionId}/question`);
  }

  answer(sessionId: string, node: number, verdict: Verdict): Promise<AnswerResponse> {
    return this.request(`/sessions/${sessionId}/answer`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ node, verdict }),
    });
  }

  blame(sessionId: string): Promise<{ rule: string | null; status: string }> {
    return this.request(`/sessions/${sessionId}/blame`);
  }

  interpretation(sessionId: string, step: number): Promise<InterpretationJson> {
    return this.request(`/sessions/${sessionId}/interpretations/${step}`);
  }

  deleteSession(sessionId: string): Promise<{ deleted: string }> {
    return this.request(`/sessions/${sessionId}`, { method: 'DELETE' });
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    return unwrap<T>(response);
  }
}
