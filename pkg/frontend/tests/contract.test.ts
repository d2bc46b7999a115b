// UI contract against the real service running with mock model profiles:
// spawns `cba serve` from the repo root and drives it exactly as the page does.

import { spawn, type ChildProcess } from "node:child_process";
import { fileURLToPath } from "node:url";
import path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderProbe, renderTrace, renderTurn } from "../src/render.js";
import { ChatStore, MemoryStorage, turnViewsFromSession } from "../src/state.js";

const REPO_ROOT = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..", "..");
const PORT = 18650 + Math.floor(Math.random() * 1000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let api: ApiClient;

async function waitForHealth(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${BASE}/healthz`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`service did not come up on ${BASE}`);
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "cba.cli", "serve", "--host", "127.0.0.1", "--port", String(PORT)],
    { cwd: REPO_ROOT, stdio: "ignore" },
  );
  api = new ApiClient(BASE);
  await waitForHealth();
}, 40_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("chat contract", () => {
  it("artifact question: answer renders, badge equals the trace route, agent tools listed", async () => {
    const store = new ChatStore(api, new MemoryStorage());
    const view = await store.send("Who is the owner of compliance artifact ART-001?");

    expect(view.error).toBeNull();
    expect(view.answer).toContain("Priya Nair");
    expect(view.trace).not.toBeNull();
    expect(view.route).toBe(view.trace!.route_decision.route);
    expect(view.route).toBe("FullAgentic");

    const html = renderTurn(view, 0);
    expect(html).toContain(`data-route="${view.trace!.route_decision.route}"`);
    expect(html).toContain("Priya Nair");
    for (const call of view.trace!.tool_calls) {
      expect(html.match(new RegExp(`data-call-id="${call.call_id}"`, "g"))).toHaveLength(1);
    }
    expect(view.trace!.tool_calls.map((c) => c.tool_name)).toEqual(["fetch_artifact"]);
  });

  it("concept question: FastTrack badge with retrieval hits in the trace panel", async () => {
    const store = new ChatStore(api, new MemoryStorage());
    const view = await store.send("What lawful bases does the GDPR provide for processing?");

    expect(view.error).toBeNull();
    expect(view.route).toBe("FastTrack");
    expect(view.trace!.tool_calls).toHaveLength(0);
    expect(view.trace!.retrieval_hits.length).toBeGreaterThan(0);

    const html = renderTrace(view.trace!);
    for (const hit of view.trace!.retrieval_hits) {
      expect(html.match(new RegExp(`data-chunk-id="${hit.chunk_id}"`, "g"))).toHaveLength(1);
    }
  });

  it("probe preview equals the executed route under the deterministic mock", async () => {
    const questions = [
      "What is the status of artifact ART-007?",
      "How quickly must a suspected data incident be triaged?",
    ];
    for (const question of questions) {
      const probed = await api.probeRoute(question);
      expect(renderProbe(probed)).toContain(`data-route="${probed.route}"`);

      const store = new ChatStore(api, new MemoryStorage());
      const view = await store.send(question);
      expect(view.route).toBe(probed.route);
    }
  });

  it("refresh reloads identical history from the session endpoint", async () => {
    const storage = new MemoryStorage();
    const store = new ChatStore(api, storage);
    await store.send("Who owns artifact ART-003?");
    await store.send("What rights does the CCPA give consumers?");
    const before = store.turns.map((v) => renderTurn(v, 0));

    const reloaded = new ChatStore(api, storage);
    expect(await reloaded.restore()).toBe(true);
    const after = reloaded.turns.map((v) => renderTurn(v, 0));
    expect(after).toEqual(before);
  });

  it("server-side validation errors surface without mutating the session", async () => {
    const sessionBefore = await api.session("never-created-session");
    expect(sessionBefore).toBeNull();

    const result = await api.chat("   ", null);
    expect(result.ok).toBe(false);
    if (!result.ok) {
      expect(result.error.code).toBe("EMPTY_QUERY");
    }
  });

  it("probe on network failure reports an inline error and leaves chat state alone", async () => {
    const dead = new ApiClient("http://127.0.0.1:9");
    const store = new ChatStore(dead, new MemoryStorage());
    await expect(dead.probeRoute("anything")).rejects.toThrow();
    expect(store.turns).toHaveLength(0);
  });

  it("session payload pairs into the same turn views the live store built", async () => {
    const storage = new MemoryStorage();
    const store = new ChatStore(api, storage);
    const sent = await store.send("Who is the owner of policy artifact ART-011?");
    const payload = await api.session(store.currentSessionId!);
    expect(payload).not.toBeNull();
    const views = turnViewsFromSession(payload!);
    expect(views).toHaveLength(1);
    expect(views[0]?.answer).toBe(sent.answer);
    expect(views[0]?.route).toBe(sent.route);
  });
});
