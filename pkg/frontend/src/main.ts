// Browser bootstrap: binds the pure renderers and the chat store to the DOM.

import { ApiClient } from "./api.js";
import { renderProbe, renderProbeError, renderThread } from "./render.js";
import { ChatStore } from "./state.js";

const api = new ApiClient("");
const store = new ChatStore(api, window.localStorage);

const thread = document.getElementById("thread")!;
const input = document.getElementById("input") as HTMLTextAreaElement;
const sendBtn = document.getElementById("send") as HTMLButtonElement;
const probeBtn = document.getElementById("probe") as HTMLButtonElement;
const probeOut = document.getElementById("probe-result")!;
const newSessionBtn = document.getElementById("new-session") as HTMLButtonElement;
const statusEl = document.getElementById("status")!;

function refreshThread(): void {
  thread.innerHTML = renderThread(store.turns);
  thread.scrollTop = thread.scrollHeight;
}

function refreshControls(): void {
  sendBtn.disabled = !store.canSend(input.value);
  probeBtn.disabled = input.value.trim().length === 0 || store.pending;
}

async function send(): Promise<void> {
  const text = input.value;
  if (!store.canSend(text)) return;
  input.value = "";
  probeOut.innerHTML = "";
  // Optimistic user bubble: render the question immediately, answer pending.
  thread.innerHTML =
    renderThread(store.turns) +
    `<article class="turn turn-pending"><div class="bubble bubble-user">${text
      .trim()
      .replace(/&/g, "&amp;")
      .replace(/</g, "&lt;")}</div><div class="bubble bubble-assistant pending">…</div></article>`;
  thread.scrollTop = thread.scrollHeight;
  refreshControls();
  await store.send(text);
  refreshThread();
  refreshControls();
  input.focus();
}

async function probe(): Promise<void> {
  const text = input.value.trim();
  if (!text) return;
  probeOut.innerHTML = `<span class="probe-pending">probing…</span>`;
  try {
    const decision = await api.probeRoute(text);
    probeOut.innerHTML = renderProbe(decision);
  } catch (err) {
    probeOut.innerHTML = renderProbeError(err instanceof Error ? err.message : String(err));
  }
}

sendBtn.addEventListener("click", () => void send());
probeBtn.addEventListener("click", () => void probe());
input.addEventListener("input", refreshControls);
input.addEventListener("keydown", (event) => {
  if (event.key === "Enter" && !event.shiftKey) {
    event.preventDefault();
    void send();
  }
});

newSessionBtn.addEventListener("click", () => {
  store.reset();
  probeOut.innerHTML = "";
  refreshThread();
  refreshControls();
});

thread.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const retryIndex = target.getAttribute("data-retry");
  if (retryIndex !== null) {
    void store.retry(Number(retryIndex)).then(() => {
      refreshThread();
      refreshControls();
    });
  }
});

async function init(): Promise<void> {
  const healthy = await api.health();
  statusEl.textContent = healthy ? "connected" : "service unreachable";
  statusEl.className = healthy ? "status-ok" : "status-bad";
  try {
    await store.restore();
  } catch {
    // Stale or unreadable session: start fresh rather than blocking the page.
    store.reset();
  }
  refreshThread();
  refreshControls();
}

void init();
