// Pure rendering: view state in, HTML strings out. Calls and values are
// shown exactly as the service printed them.

import { EdtNodeJson, FactJson, InterpretationJson } from './api.js';
import { UiSessionView } from './session.js';

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;');
}

export function renderNode(node: EdtNodeJson, view: UiSessionView): string {
  const verdict = view.verdicts[node.id] ?? 'unanswered';
  const asking = view.question?.node?.id === node.id ? ' asking' : '';
  const badge =
    verdict === 'correct' ? '✓' : verdict === 'wrong' ? '✗' : '?';
  const children = node.children
    .map((child) => renderNode(child, view))
    .join('');
  return (
    `<li class="edt-node ${verdict}${asking}" data-node="${node.id}">` +
    `<details open><summary>` +
    `<span class="badge">${badge}</span> ` +
    `<code>${escapeHtml(node.call)} = ${escapeHtml(node.value)}</code>` +
    ` <span class="rule">[${escapeHtml(node.rule)}]</span>` +
    `</summary>` +
    (children ? `<ul>${children}</ul>` : '') +
    `</details></li>`
  );
}

export function renderTree(view: UiSessionView): string {
  if (!view.edt) {
    return '<p class="empty">no session</p>';
  }
  return `<ul class="edt">${renderNode(view.edt, view)}</ul>`;
}

export function renderBanner(view: UiSessionView): string {
  if (view.error) {
    return `<div class="banner error">service error: ${escapeHtml(view.error)}</div>`;
  }
  if (view.status === 'blamed' && view.blamed) {
    return `<div class="banner blamed">Blamed: ${escapeHtml(view.blamed)}</div>`;
  }
  if (view.status === 'exonerated') {
    return '<div class="banner exonerated">No error found</div>';
  }
  return '';
}

export function renderQuestion(view: UiSessionView): string {
  const q = view.question;
  if (!q || !q.node) {
    return renderBanner(view) || '<p class="empty">no open question</p>';
  }
  return (
    `<p class="question">is <code>${escapeHtml(q.node.call)} = ` +
    `${escapeHtml(q.node.value)}</code> correct?</p>`
  );
}

export function factLine(fact: FactJson): string {
  let line = `* ${fact.head}`;
  if (fact.guard) {
    line += ` | ${fact.guard}`;
  }
  line += ` = ${fact.body}`;
  const rules = fact.trace.map((s) => s.rule).filter((r) => !r.startsWith('Bot_'));
  if (rules.length) {
    line += ` <${rules.join(',')}>`;
  }
  return line;
}

export function renderInterpretation(interp: InterpretationJson | null): string {
  if (!interp) {
    return '<p class="empty">no interpretation loaded</p>';
  }
  const lines = interp.facts.map((f) => escapeHtml(factLine(f)));
  const bots = interp.bot_facts.map(
    (f) => escapeHtml(`* ${f.head} = ${f.body}`),
  );
  const botBlock = bots.length
    ? `\n-- undefined so far:\n${bots.join('\n')}`
    : '';
  return (
    `<h3>I${interp.step}</h3>` +
    `<pre class="listing">${lines.join('\n')}${botBlock}</pre>`
  );
}

export function render(view: UiSessionView): string {
  return (
    `<section class="banner-slot">${renderBanner(view)}</section>` +
    `<section class="question-slot">${renderQuestion(view)}</section>` +
    `<section class="tree-slot">${renderTree(view)}</section>` +
    `<section class="interp-slot">${renderInterpretation(view.interpretation)}</section>`
  );
}
