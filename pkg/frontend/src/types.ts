// Wire types for the /v1 HTTP+JSON API.

export type RouteName = "FastTrack" | "FullAgentic";
export type ParseStatus = "parsed" | "fallback";

export interface RouteDecision {
  route: RouteName;
  raw_model_output: string;
  parse_status: ParseStatus;
  decision_latency: number;
}

export interface TracedHit {
  chunk_id: string;
  score: number;
  rank: number;
  text: string;
}

export interface TracedToolCall {
  tool_name: string;
  arguments: Record<string, unknown>;
  call_id: string;
  status: "ok" | "error";
  content: string;
  step_index: number;
  latency: number;
  structured?: Record<string, unknown>;
}

export interface TurnTrace {
  route_decision: RouteDecision;
  retrieval_hits: TracedHit[];
  tool_calls: TracedToolCall[];
  total_latency: number;
  answer: string;
}

export interface ChatPayload {
  session_id: string;
  answer: string;
  trace: TurnTrace;
}

export interface ApiError {
  code: string;
  message: string;
}

export interface SessionTurn {
  role: "user" | "assistant" | "system" | "tool";
  content: string;
  timestamp: number;
  trace_ref?: string;
}

export interface SessionPayload {
  session_id: string;
  created_at: number;
  turns: SessionTurn[];
  traces: Record<string, TurnTrace>;
}

/** One question/answer exchange as the UI displays it. */
export interface TurnView {
  question: string;
  answer: string;
  route: RouteName | null;
  forced: boolean;
  latencySeconds: number | null;
  trace: TurnTrace | null;
  error: ApiError | null;
}
