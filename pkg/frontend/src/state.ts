// Chat state, derived purely from server responses. The store never invents
// content: turn views are rebuilt from POST /v1/chat payloads or from
// GET /v1/sessions on reload, so a refresh shows identical history.

import type { ApiClient, ChatResult } from "./api.js";
import type { ChatPayload, SessionPayload, TurnView } from "./types.js";

const SESSION_KEY = "cba_session_id";

export interface KeyValueStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStorage implements KeyValueStorage {
  private readonly map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.get(key) ?? null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
  removeItem(key: string): void {
    this.map.delete(key);
  }
}

export function turnViewFromPayload(question: string, payload: ChatPayload): TurnView {
  const decision = payload.trace.route_decision;
  return {
    question,
    answer: payload.answer,
    route: decision.route,
    forced: decision.parse_status === "fallback",
    latencySeconds: payload.trace.total_latency,
    trace: payload.trace,
    error: null,
  };
}

export function errorTurnView(question: string, result: ChatResult & { ok: false }): TurnView {
  return {
    question,
    answer: result.error.message,
    route: result.payload?.trace.route_decision.route ?? null,
    forced: true,
    latencySeconds: result.payload?.trace.total_latency ?? null,
    trace: result.payload?.trace ?? null,
    error: result.error,
  };
}

/** Rebuild the turn views for a reloaded session (user/assistant pairs). */
export function turnViewsFromSession(session: SessionPayload): TurnView[] {
  const views: TurnView[] = [];
  let pendingQuestion: string | null = null;
  for (const turn of session.turns) {
    if (turn.role === "user") {
      pendingQuestion = turn.content;
      continue;
    }
    if (turn.role !== "assistant" || pendingQuestion === null) continue;
    const trace = turn.trace_ref ? session.traces[turn.trace_ref] ?? null : null;
    views.push({
      question: pendingQuestion,
      answer: turn.content,
      route: trace?.route_decision.route ?? null,
      forced: trace?.route_decision.parse_status === "fallback",
      latencySeconds: trace?.total_latency ?? null,
      trace,
      error: null,
    });
    pendingQuestion = null;
  }
  return views;
}

export class ChatStore {
  readonly turns: TurnView[] = [];
  private sessionId: string | null;
  private inFlight = false;

  constructor(
    private readonly api: ApiClient,
    private readonly storage: KeyValueStorage,
  ) {
    this.sessionId = storage.getItem(SESSION_KEY);
  }

  get currentSessionId(): string | null {
    return this.sessionId;
  }

  get pending(): boolean {
    return this.inFlight;
  }

  /** Send is allowed only for non-empty input with no request in flight. */
  canSend(text: string): boolean {
    return text.trim().length > 0 && !this.inFlight;
  }

  async send(text: string): Promise<TurnView> {
    const query = text.trim();
    if (!this.canSend(query)) {
      throw new Error("send not allowed: empty input or request in flight");
    }
    this.inFlight = true;
    try {
      const result = await this.api.chat(query, this.sessionId);
      let view: TurnView;
      if (result.ok) {
        this.sessionId = result.payload.session_id;
        this.storage.setItem(SESSION_KEY, this.sessionId);
        view = turnViewFromPayload(query, result.payload);
      } else {
        if (result.payload?.session_id) {
          this.sessionId = result.payload.session_id;
          this.storage.setItem(SESSION_KEY, this.sessionId);
        }
        view = errorTurnView(query, result);
      }
      this.turns.push(view);
      return view;
    } catch (err) {
      // Transport failure: surface a retryable error bubble, session unchanged.
      const view: TurnView = {
        question: query,
        answer: err instanceof Error ? err.message : String(err),
        route: null,
        forced: false,
        latencySeconds: null,
        trace: null,
        error: { code: "NETWORK", message: String(err) },
      };
      this.turns.push(view);
      return view;
    } finally {
      this.inFlight = false;
    }
  }

  /** Drop the failed exchange and resend the same question. */
  async retry(index: number): Promise<TurnView | null> {
    const failed = this.turns[index];
    if (!failed || !failed.error) return null;
    this.turns.splice(index, 1);
    return this.send(failed.question);
  }

  /** Reload history from the server; returns false when the session is gone. */
  async restore(): Promise<boolean> {
    if (!this.sessionId) return false;
    const session = await this.api.session(this.sessionId);
    if (!session) {
      this.reset();
      return false;
    }
    this.turns.length = 0;
    this.turns.push(...turnViewsFromSession(session));
    return true;
  }

  reset(): void {
    this.sessionId = null;
    this.storage.removeItem(SESSION_KEY);
    this.turns.length = 0;
  }
}
