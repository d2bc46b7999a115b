import { describe, expect, it } from "vitest";

import { ApiClient, type FetchLike } from "../src/api.js";
import { ChatStore, MemoryStorage, turnViewsFromSession } from "../src/state.js";
import type { SessionPayload, TurnTrace } from "../src/types.js";

function fastTrace(): TurnTrace {
  return {
    route_decision: {
      route: "FastTrack",
      raw_model_output: "FastTrack",
      parse_status: "parsed",
      decision_latency: 0.01,
    },
    retrieval_hits: [],
    tool_calls: [],
    total_latency: 0.1,
    answer: "an answer",
  };
}

function chatResponder(): FetchLike {
  return async (input, init) => {
    if (input.endsWith("/v1/chat")) {
      const body = JSON.parse(String(init?.body));
      return new Response(
        JSON.stringify({
          session_id: body.session_id ?? "s-1",
          answer: "an answer",
          trace: fastTrace(),
        }),
        { status: 200 },
      );
    }
    throw new Error(`unexpected ${input}`);
  };
}

describe("ChatStore.canSend", () => {
  it("rejects empty and whitespace input", () => {
    const store = new ChatStore(new ApiClient("http://x", chatResponder()), new MemoryStorage());
    expect(store.canSend("")).toBe(false);
    expect(store.canSend("   ")).toBe(false);
    expect(store.canSend("hello")).toBe(true);
  });

  it("rejects input while a request is in flight", async () => {
    let release: () => void = () => {};
    const gate = new Promise<void>((resolve) => (release = resolve));
    const fetchFn: FetchLike = async (input, init) => {
      await gate;
      return chatResponder()(input, init);
    };
    const store = new ChatStore(new ApiClient("http://x", fetchFn), new MemoryStorage());
    const sending = store.send("first");
    expect(store.pending).toBe(true);
    expect(store.canSend("second")).toBe(false);
    release();
    await sending;
    expect(store.canSend("second")).toBe(true);
  });
});

describe("ChatStore.send", () => {
  it("persists the returned session id", async () => {
    const storage = new MemoryStorage();
    const store = new ChatStore(new ApiClient("http://x", chatResponder()), storage);
    const view = await store.send("hello");
    expect(view.route).toBe("FastTrack");
    expect(store.currentSessionId).toBe("s-1");
    expect(storage.getItem("cba_session_id")).toBe("s-1");
  });

  it("turns transport failures into retryable error views", async () => {
    const failing: FetchLike = async () => {
      throw new Error("connection refused");
    };
    const store = new ChatStore(new ApiClient("http://x", failing), new MemoryStorage());
    const view = await store.send("hello");
    expect(view.error?.code).toBe("NETWORK");
    expect(store.currentSessionId).toBeNull();
    expect(store.turns).toHaveLength(1);
  });

  it("retry drops the failed turn and resends the question", async () => {
    let failures = 1;
    const flaky: FetchLike = async (input, init) => {
      if (failures > 0) {
        failures -= 1;
        throw new Error("blip");
      }
      return chatResponder()(input, init);
    };
    const store = new ChatStore(new ApiClient("http://x", flaky), new MemoryStorage());
    await store.send("try me");
    expect(store.turns[0]?.error).not.toBeNull();
    const view = await store.retry(0);
    expect(view?.error).toBeNull();
    expect(store.turns).toHaveLength(1);
    expect(store.turns[0]?.question).toBe("try me");
  });
});

describe("turnViewsFromSession", () => {
  it("pairs user/assistant turns and attaches traces by ref", () => {
    const payload: SessionPayload = {
      session_id: "s",
      created_at: 0,
      turns: [
        { role: "user", content: "q1", timestamp: 1 },
        { role: "assistant", content: "a1", timestamp: 2, trace_ref: "t1" },
        { role: "user", content: "q2", timestamp: 3 },
        { role: "assistant", content: "a2", timestamp: 4, trace_ref: "t2" },
      ],
      traces: { t1: fastTrace(), t2: fastTrace() },
    };
    const views = turnViewsFromSession(payload);
    expect(views).toHaveLength(2);
    expect(views[0]?.question).toBe("q1");
    expect(views[0]?.route).toBe("FastTrack");
    expect(views[1]?.answer).toBe("a2");
  });

  it("reset clears the stored session", async () => {
    const storage = new MemoryStorage();
    const store = new ChatStore(new ApiClient("http://x", chatResponder()), storage);
    await store.send("hello");
    store.reset();
    expect(store.currentSessionId).toBeNull();
    expect(storage.getItem("cba_session_id")).toBeNull();
    expect(store.turns).toHaveLength(0);
  });
});
