import { describe, expect, it } from 'vitest';

import { DebugServiceClient } from '../src/api.js';
import { SessionFlow } from '../src/session.js';
import { factLine, render, renderInterpretation } from '../src/view.js';
import { ANSWER_SEQUENCE, CREATE_ADDB, FILTER_I2 } from './payloads.js';

type Route = (init?: RequestInit) => { status: number; body: unknown };

function fakeFetch(routes: Record<string, Route>): typeof fetch {
  const calls: string[] = [];
  const impl = (async (url: string | URL | Request, init?: RequestInit) => {
    const key = `${init?.method ?? 'GET'} ${String(url)}`;
    calls.push(key);
    const route = routes[key];
    if (!route) {
      throw new Error(`unexpected request ${key}`);
    }
    const { status, body } = route(init);
    return {
      ok: status < 400,
      status,
      statusText: String(status),
      json: async () => body,
    } as Response;
  }) as typeof fetch;
  (impl as unknown as { calls: string[] }).calls = calls;
  return impl;
}

const BASE = 'http://svc';

function scriptedService(): typeof fetch {
  let answerCount = 0;
  return fakeFetch({
    [`POST ${BASE}/sessions`]: () => ({ status: 200, body: CREATE_ADDB }),
    [`POST ${BASE}/sessions/sess-1/answer`]: () => ({
      status: 200,
      body: ANSWER_SEQUENCE[answerCount++],
    }),
    [`GET ${BASE}/sessions/sess-1/interpretations/2`]: () => ({
      status: 200,
      body: FILTER_I2,
    }),
  });
}

describe('scripted debugging session', () => {
  it('walks the question loop and displays the blamed rule', async () => {
    const flow = new SessionFlow(new DebugServiceClient(BASE, scriptedService()));
    await flow.start('...program text...', 'main24');
    expect(flow.view.edt?.call).toBe('main24');
    expect(flow.view.question?.node?.id).toBe(1);

    await flow.answer('wrong');
    expect(flow.view.question?.node?.id).toBe(2);
    await flow.answer('wrong');
    expect(flow.view.question?.node?.id).toBe(3);
    await flow.answer('correct');

    expect(flow.view.status).toBe('blamed');
    expect(flow.view.blamed).toBe('A3');
    const html = render(flow.view);
    expect(html).toContain('Blamed: A3');
    // verdict badges mirror the submitted answers
    expect(html).toContain('edt-node wrong');
    expect(html).toContain('edt-node correct');
  });

  it('renders the exonerated banner when the root is correct', async () => {
    const fetchImpl = fakeFetch({
      [`POST ${BASE}/sessions`]: () => ({ status: 200, body: CREATE_ADDB }),
      [`POST ${BASE}/sessions/sess-1/answer`]: () => ({
        status: 200,
        body: {
          status: 'exonerated',
          blamed: null,
          question: {
            node: null,
            done: true,
            status: 'exonerated',
            blamed: null,
          },
        },
      }),
    });
    const flow = new SessionFlow(new DebugServiceClient(BASE, fetchImpl));
    await flow.start('p', 'main24');
    await flow.answer('correct');
    expect(render(flow.view)).toContain('No error found');
  });
});

describe('interpretation browser', () => {
  it('renders the step-two fact listing received from the service', async () => {
    const flow = new SessionFlow(new DebugServiceClient(BASE, scriptedService()));
    await flow.start('p', 'main24');
    await flow.loadStep(2);
    const html = renderInterpretation(flow.view.interpretation);
    expect(html).toContain('I2');
    expect(html).toContain(
      '* filter(b,Cons(c,Nil)) | snd(match(True,b@[c])) = Cons(c,Nil) &lt;F2,I1,F1&gt;',
    );
    expect(html).toContain('* filter(b,Nil) = Nil &lt;F1&gt;');
    expect(html).toContain('-- undefined so far:');
    // all seven facts of the second step are listed
    expect((html.match(/\* /g) ?? []).length).toBe(8);
  });

  it('prints fact lines in the listing style, hiding bottom-rule steps', () => {
    expect(factLine(FILTER_I2.facts[0])).toBe(
      '* filter(b,Cons(c,Cons(d,e))) | snd(match(False,b@[c])) = Bot <F2,I2,F2>',
    );
  });
});

describe('the view never computes verdicts locally', () => {
  it('freezes all state when the service is unreachable', async () => {
    let healthy = true;
    let answerCount = 0;
    const fetchImpl = fakeFetch({
      [`POST ${BASE}/sessions`]: () => ({ status: 200, body: CREATE_ADDB }),
      [`POST ${BASE}/sessions/sess-1/answer`]: () => {
        if (!healthy) {
          throw new Error('connection refused');
        }
        return { status: 200, body: ANSWER_SEQUENCE[answerCount++] };
      },
    });
    const flow = new SessionFlow(new DebugServiceClient(BASE, fetchImpl));
    await flow.start('p', 'main24');
    await flow.answer('wrong');
    const before = JSON.stringify({ ...flow.view, error: null });

    healthy = false;
    await flow.answer('wrong');
    // no verdict recorded, no status transition, only an error message
    const after = JSON.stringify({ ...flow.view, error: null });
    expect(after).toBe(before);
    expect(flow.view.error).toContain('connection refused');
    expect(flow.view.status).toBe('in-progress');
    expect(flow.view.blamed).toBeNull();
  });

  it('ignores answers while a request is in flight', async () => {
    let resolveAnswer!: (value: { status: number; body: unknown }) => void;
    const pending = new Promise<{ status: number; body: unknown }>((res) => {
      resolveAnswer = res;
    });
    const impl = (async (url: string | URL | Request, init?: RequestInit) => {
      const key = `${init?.method ?? 'GET'} ${String(url)}`;
      if (key === `POST ${BASE}/sessions`) {
        return { ok: true, status: 200, json: async () => CREATE_ADDB } as Response;
      }
      const { status, body } = await pending;
      return { ok: status < 400, status, json: async () => body } as Response;
    }) as typeof fetch;

    const flow = new SessionFlow(new DebugServiceClient(BASE, impl));
    await flow.start('p', 'main24');
    const first = flow.answer('wrong');
    const second = flow.answer('correct'); // busy: must be a no-op
    resolveAnswer({ status: 200, body: ANSWER_SEQUENCE[0] });
    await Promise.all([first, second]);
    expect(flow.view.verdicts).toEqual({ 1: 'wrong' });
    expect(flow.view.question?.node?.id).toBe(2);
  });
});
