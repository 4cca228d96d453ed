// DOM wiring for the debugging page. One question is active at a time;
// the answer buttons stay disabled while a request is in flight.

import { DebugServiceClient } from './api.js';
import { SessionFlow } from './session.js';
import { render, renderInterpretation } from './view.js';

export function mount(root: Document = document): void {
  const client = new DebugServiceClient(
    (root.querySelector('#service-url') as HTMLInputElement)?.value ||
      'http://127.0.0.1:8765',
  );
  const flow = new SessionFlow(client);

  const out = root.querySelector('#session') as HTMLElement;
  const program = root.querySelector('#program') as HTMLTextAreaElement;
  const goal = root.querySelector('#goal') as HTMLInputElement;
  const startBtn = root.querySelector('#start') as HTMLButtonElement;
  const yesBtn = root.querySelector('#correct') as HTMLButtonElement;
  const noBtn = root.querySelector('#wrong') as HTMLButtonElement;
  const slider = root.querySelector('#step') as HTMLInputElement;
  const interpOut = root.querySelector('#interpretation') as HTMLElement;

  function paint(): void {
    out.innerHTML = render(flow.view);
    if (interpOut) {
      interpOut.innerHTML = renderInterpretation(flow.view.interpretation);
    }
    const open = !!flow.view.question?.node && !flow.view.busy;
    yesBtn.disabled = !open;
    noBtn.disabled = !open;
  }

  startBtn.addEventListener('click', async () => {
    await flow.start(program.value, goal.value);
    paint();
  });
  yesBtn.addEventListener('click', async () => {
    await flow.answer('correct');
    paint();
  });
  noBtn.addEventListener('click', async () => {
    await flow.answer('wrong');
    paint();
  });
  slider.addEventListener('change', async () => {
    await flow.loadStep(Number(slider.value));
    paint();
  });

  paint();
}

if (typeof document !== 'undefined' && document.querySelector('#session')) {
  mount(document);
}
