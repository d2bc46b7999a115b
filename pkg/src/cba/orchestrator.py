"""Ties router and flows together: one entry point per user query, plus session persistence.

Each query runs under its session's lock (strict per-session serialization);
distinct sessions proceed fully in parallel. Every handled query appends the
user turn and an assistant turn, even when a downstream backend fails.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import fasttrack, router as router_ops
from .agent import AgentStep, run_agent
from .artifacts import ArtifactStore
from .config import MODES, AppConfig
from .core import (
    ChatTurn,
    ParseStatus,
    Role,
    Route,
    RouteDecision,
    Session,
    TracedHit,
    TracedToolCall,
    TurnTrace,
    append_turn,
    render_history,
)
from .errors import AgentUnavailable, BackendError, ConfigError, RouterUnavailable
from .gateway import Gateway
from .retrieval import Index, RetrievalHit, ingest, search
from .tools import ToolCatalog, catalog_default


class SessionStore:
    """In-memory sessions with an append-only JSONL event log per session."""

    def __init__(self, data_dir: Optional[str] = None):
        self._dir = Path(data_dir) if data_dir else None
        if self._dir:
            self._dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._traces: dict[str, dict[str, dict]] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> Optional[Path]:
        return self._dir / f"{session_id}.jsonl" if self._dir else None

    def lock(self, session_id: str) -> threading.RLock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.RLock()
            return self._locks[session_id]

    def _append_event(self, session_id: str, event: dict) -> None:
        path = self._path(session_id)
        if path:
            with open(path, "a", encoding="utf-8") as f:
                f.write(json.dumps(event) + "\n")

    def _load_from_disk(self, session_id: str) -> Optional[Session]:
        path = self._path(session_id)
        if not path or not path.exists():
            return None
        session = None
        traces: dict[str, dict] = {}
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            event = json.loads(line)
            if event["type"] == "created":
                session = Session(session_id=session_id, created_at=event["created_at"])
            elif event["type"] == "turn" and session is not None:
                session.turns.append(ChatTurn.from_dict(event["turn"]))
            elif event["type"] == "trace":
                traces[event["trace_ref"]] = event["trace"]
        if session is not None:
            self._traces[session_id] = traces
        return session

    def get(self, session_id: str) -> Optional[Session]:
        with self.lock(session_id):
            if session_id not in self._sessions:
                loaded = self._load_from_disk(session_id)
                if loaded is None:
                    return None
                self._sessions[session_id] = loaded
            return self._sessions[session_id]

    def get_or_create(self, session_id: Optional[str] = None) -> Session:
        sid = session_id or uuid.uuid4().hex
        with self.lock(sid):
            existing = self.get(sid)
            if existing is not None:
                return existing
            session = Session(session_id=sid)
            self._sessions[sid] = session
            self._traces.setdefault(sid, {})
            self._append_event(sid, {"type": "created", "created_at": session.created_at})
            return session

    def append(self, session: Session, turn: ChatTurn) -> None:
        with self.lock(session.session_id):
            append_turn(session, turn)
            self._append_event(session.session_id, {"type": "turn", "turn": turn.to_dict()})

    def record_trace(self, session_id: str, trace_ref: str, trace: TurnTrace) -> None:
        with self.lock(session_id):
            self._traces.setdefault(session_id, {})[trace_ref] = trace.to_dict()
            self._append_event(
                session_id, {"type": "trace", "trace_ref": trace_ref, "trace": trace.to_dict()}
            )

    def traces(self, session_id: str) -> dict[str, dict]:
        return dict(self._traces.get(session_id, {}))


@dataclass
class QueryResult:
    session_id: str
    answer: str
    trace: TurnTrace
    error: Optional[str] = None  # machine-stable code when the turn failed


def _forced_decision(mode: str) -> RouteDecision:
    synthetic = Route.FULLAGENTIC if mode == "fullagentic_only" else Route.FASTTRACK
    return RouteDecision(
        route=synthetic,
        raw_model_output=f"forced:{mode}",
        parse_status=ParseStatus.FALLBACK,
        decision_latency=0.0,
    )


def _hits_to_trace(hits: list[RetrievalHit]) -> list[TracedHit]:
    return [
        TracedHit(chunk_id=h.chunk.chunk_id, score=h.score, rank=h.rank, text=h.chunk.text)
        for h in hits
    ]


def _steps_to_trace(steps: list[AgentStep]) -> list[TracedToolCall]:
    calls = []
    for step in steps:
        for call, obs in zip(step.batch or [], step.observations):
            calls.append(
                TracedToolCall(
                    tool_name=call.tool_name,
                    arguments=call.arguments,
                    call_id=call.call_id,
                    status=obs.status,
                    content=obs.content,
                    step_index=step.index,
                    latency=obs.elapsed,
                    structured=obs.structured,
                )
            )
    return calls


class Orchestrator:
    def __init__(self, config: AppConfig):
        self.config = config
        self.gateway = Gateway(config.profiles)
        self.index = self._load_index()
        self.store = (
            ArtifactStore.load(config.artifacts_path) if config.artifacts_path else ArtifactStore([])
        )
        self.catalog: ToolCatalog = catalog_default(
            self.store,
            self.index,
            self.gateway,
            specialist_domains=config.specialist_domains,
            content_cap=config.tooling.observation_cap,
            fanout=config.tooling.fanout,
            call_timeout=config.tooling.call_timeout,
        )
        self.sessions = SessionStore(config.service.data_dir)

    def _load_index(self) -> Index:
        params = self.config.retrieval
        if params.index_path and Path(params.index_path).exists():
            return Index.load(params.index_path)
        if params.corpus_dir:
            index, _ = ingest(
                params.corpus_dir,
                target_tokens=params.target_tokens,
                overlap_tokens=params.overlap_tokens,
                min_tokens=params.min_chunk_tokens,
                max_symbol_ratio=params.max_symbol_ratio,
                mode=params.mode,
                gateway=self.gateway,
                embed_profile=params.embed_profile,
            )
            return index
        raise ConfigError("no index_path on disk and no corpus_dir to ingest")

    def decide_route(self, query: str, history: str = "") -> RouteDecision:
        try:
            return router_ops.route(self.config.router, self.gateway, query, history)
        except RouterUnavailable as e:
            return RouteDecision(
                route=self.config.router.fallback,
                raw_model_output=f"router unavailable: {e}",
                parse_status=ParseStatus.FALLBACK,
                decision_latency=0.0,
            )

    def _use_rag(self, query: str) -> bool:
        floor = self.config.retrieval.skip_rag_below
        if floor <= 0.0:
            return True
        probe = search(self.index, query, 1, gateway=self.gateway)
        return bool(probe) and probe[0].score >= floor

    def handle_query(
        self, session: Session, query: str, mode: Optional[str] = None
    ) -> QueryResult:
        """Dispatch one query per the active mode; always appends both turns."""
        mode = mode or self.config.mode
        if mode not in MODES:
            raise ConfigError(f"unknown mode {mode!r}; valid: {', '.join(MODES)}")
        if not query or not query.strip():
            raise ValueError("query must be non-empty")

        with self.sessions.lock(session.session_id):
            start = time.monotonic()
            history = render_history(session, self.config.history_max_turns)
            self.sessions.append(session, ChatTurn(role=Role.USER, content=query))

            decision: RouteDecision
            error: Optional[str] = None
            hits: list[RetrievalHit] = []
            steps: list[AgentStep] = []
            answer = ""

            if mode == "auto":
                decision = self.decide_route(query, history)
                dispatch = (
                    "fasttrack_only" if decision.route is Route.FASTTRACK else "fullagentic_only"
                )
            else:
                decision = _forced_decision(mode)
                dispatch = mode

            try:
                if dispatch == "vanilla":
                    answer, hits = fasttrack.run_fasttrack(
                        None,
                        self.gateway,
                        self.config.generator_profile,
                        query,
                        history,
                        use_rag=False,
                    )
                elif dispatch == "fasttrack_only":
                    answer, hits = fasttrack.run_fasttrack(
                        self.index,
                        self.gateway,
                        self.config.generator_profile,
                        query,
                        history,
                        k=self.config.retrieval.k,
                        use_rag=self._use_rag(query),
                    )
                else:
                    answer, steps = run_agent(
                        self.config.agent, self.catalog, self.gateway, query, history
                    )
            except AgentUnavailable as e:
                steps = e.partial_steps
                error = "AGENT_UNAVAILABLE"
                answer = f"AGENT_UNAVAILABLE: {e}"
            except BackendError as e:
                error = type(e).__name__.upper()
                answer = f"{error}: {e}"
            except Exception as e:  # keep the user/assistant pairing invariant
                error = "INTERNAL_ERROR"
                answer = f"INTERNAL_ERROR: {e}"

            trace = TurnTrace(
                route_decision=decision,
                retrieval_hits=_hits_to_trace(hits),
                tool_calls=_steps_to_trace(steps),
                total_latency=time.monotonic() - start,
                answer=answer,
            )
            trace_ref = uuid.uuid4().hex
            self.sessions.append(
                session, ChatTurn(role=Role.ASSISTANT, content=answer, trace_ref=trace_ref)
            )
            self.sessions.record_trace(session.session_id, trace_ref, trace)
            return QueryResult(
                session_id=session.session_id, answer=answer, trace=trace, error=error
            )
