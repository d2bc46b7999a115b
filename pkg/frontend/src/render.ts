// Pure HTML renderers: state in, markup string out. Keeping these DOM-free
// makes the answer/badge/trace contract testable without a browser.

import type { RouteDecision, TurnTrace, TurnView } from "./types.js";

export function escapeHtml(value: unknown): string {
  return String(value)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function renderBadge(route: string | null, forced: boolean): string {
  if (!route) {
    return `<span class="badge badge-error">error</span>`;
  }
  const cls = route === "FastTrack" ? "badge-fast" : "badge-agentic";
  const marker = forced ? `<span class="badge-forced">forced</span>` : "";
  return `<span class="badge ${cls}" data-route="${escapeHtml(route)}">${escapeHtml(route)}</span>${marker}`;
}

function renderLatency(seconds: number | null): string {
  if (seconds === null) return "";
  return `<span class="latency">${(seconds * 1000).toFixed(0)} ms</span>`;
}

export function renderTrace(trace: TurnTrace): string {
  const parts: string[] = [];
  if (trace.retrieval_hits.length > 0) {
    const items = trace.retrieval_hits
      .map(
        (hit) =>
          `<li class="hit" data-chunk-id="${escapeHtml(hit.chunk_id)}">` +
          `<code>${escapeHtml(hit.chunk_id)}</code> ` +
          `<span class="score">score ${hit.score.toFixed(3)}</span>` +
          `<div class="hit-text">${escapeHtml(hit.text)}</div></li>`,
      )
      .join("");
    parts.push(`<section class="hits"><h4>Retrieved context</h4><ol>${items}</ol></section>`);
  }
  if (trace.tool_calls.length > 0) {
    const items = [...trace.tool_calls]
      .sort((a, b) => a.step_index - b.step_index)
      .map(
        (call) =>
          `<li class="tool-call ${call.status}" data-call-id="${escapeHtml(call.call_id)}">` +
          `<details><summary>step ${call.step_index}: ` +
          `<code>${escapeHtml(call.tool_name)}</code> ` +
          `<span class="args">${escapeHtml(JSON.stringify(call.arguments))}</span> ` +
          `<span class="status">${call.status}</span></summary>` +
          `<pre class="observation">${escapeHtml(call.content)}</pre></details></li>`,
      )
      .join("");
    parts.push(`<section class="tools"><h4>Tool calls</h4><ol>${items}</ol></section>`);
  }
  if (parts.length === 0) {
    parts.push(`<p class="trace-empty">No retrieval or tool activity for this turn.</p>`);
  }
  return parts.join("");
}

export function renderTurn(view: TurnView, index: number): string {
  const blocks: string[] = [];
  blocks.push(`<div class="bubble bubble-user">${escapeHtml(view.question)}</div>`);
  if (view.error && !view.trace) {
    blocks.push(
      `<div class="bubble bubble-error">` +
        `<span class="error-code">${escapeHtml(view.error.code)}</span> ` +
        `${escapeHtml(view.answer)} ` +
        `<button class="retry" data-retry="${index}">retry</button></div>`,
    );
    return `<article class="turn turn-error" data-turn="${index}">${blocks.join("")}</article>`;
  }
  const header =
    `<header class="answer-meta">${renderBadge(view.route, view.forced)}` +
    `${renderLatency(view.latencySeconds)}</header>`;
  const trace = view.trace
    ? `<details class="trace-panel"><summary>trace</summary>${renderTrace(view.trace)}</details>`
    : "";
  blocks.push(
    `<div class="bubble bubble-assistant">${header}` +
      `<div class="answer-text">${escapeHtml(view.answer)}</div>${trace}</div>`,
  );
  return `<article class="turn" data-turn="${index}">${blocks.join("")}</article>`;
}

export function renderThread(turns: TurnView[]): string {
  return turns.map(renderTurn).join("");
}

export function renderProbe(decision: RouteDecision): string {
  const fallback =
    decision.parse_status === "fallback"
      ? ` <span class="badge-forced" data-fallback="true">fallback</span>`
      : "";
  return (
    `<span class="probe-result">would route to ` +
    `${renderBadge(decision.route, false)}${fallback} ` +
    `<span class="latency">${(decision.decision_latency * 1000).toFixed(0)} ms</span></span>`
  );
}

export function renderProbeError(message: string): string {
  return `<span class="probe-error">route probe failed: ${escapeHtml(message)}</span>`;
}
