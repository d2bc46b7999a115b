// Thin typed client for the /v1 API. All server access goes through here;
// POST /v1/chat is the only call that mutates server state.

import type { ApiError, ChatPayload, RouteDecision, SessionPayload } from "./types.js";

export type ChatResult =
  | { ok: true; payload: ChatPayload }
  | { ok: false; error: ApiError; payload: ChatPayload | null };

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string = "", fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async post(path: string, body: unknown): Promise<Response> {
    return this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  /** Send one user message; never throws on structured server errors. */
  async chat(query: string, sessionId: string | null, mode?: string): Promise<ChatResult> {
    const body: Record<string, unknown> = { query };
    if (sessionId) body.session_id = sessionId;
    if (mode) body.mode = mode;
    const resp = await this.post("/v1/chat", body);
    const data = await resp.json();
    if (resp.ok) {
      return { ok: true, payload: data as ChatPayload };
    }
    const error: ApiError = data.error ?? { code: "HTTP_" + resp.status, message: resp.statusText };
    // 502 bodies still carry the partial trace alongside the error.
    const payload = data.session_id ? (data as ChatPayload) : null;
    return { ok: false, error, payload };
  }

  async probeRoute(query: string): Promise<RouteDecision> {
    const resp = await this.post("/v1/router/decide", { query });
    if (!resp.ok) {
      const data = await resp.json().catch(() => null);
      const error: ApiError = data?.error ?? { code: "HTTP_" + resp.status, message: resp.statusText };
      throw new Error(`${error.code}: ${error.message}`);
    }
    return (await resp.json()) as RouteDecision;
  }

  async session(sessionId: string): Promise<SessionPayload | null> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/sessions/${encodeURIComponent(sessionId)}`);
    if (resp.status === 404) return null;
    if (!resp.ok) throw new Error(`session fetch failed: ${resp.status}`);
    return (await resp.json()) as SessionPayload;
  }

  async health(): Promise<boolean> {
    try {
      const resp = await this.fetchFn(`${this.baseUrl}/healthz`);
      return resp.ok;
    } catch {
      return false;
    }
  }
}
