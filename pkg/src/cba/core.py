"""Shared domain types: chat turns, sessions, route decisions, and per-turn traces.

Latency fields everywhere are measured with the monotonic clock; wall-clock
timestamps appear only in display-oriented fields such as ``Session.created_at``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from .errors import ConsecutiveUserTurns

DEFAULT_HISTORY_TURNS = 12


class Role(str, Enum):
    USER = "user"
    ASSISTANT = "assistant"
    SYSTEM = "system"
    TOOL = "tool"


class Route(str, Enum):
    FASTTRACK = "FastTrack"
    FULLAGENTIC = "FullAgentic"


class ParseStatus(str, Enum):
    PARSED = "parsed"
    FALLBACK = "fallback"


def monotonic_ms() -> int:
    return int(time.monotonic() * 1000)


@dataclass
class ChatTurn:
    role: Role
    content: str
    timestamp: int = field(default_factory=monotonic_ms)
    trace_ref: Optional[str] = None

    def __post_init__(self):
        if self.role in (Role.USER, Role.ASSISTANT) and not self.content:
            raise ValueError(f"{self.role.value} turn needs non-empty content")

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "role": self.role.value,
            "content": self.content,
            "timestamp": self.timestamp,
        }
        if self.trace_ref is not None:
            d["trace_ref"] = self.trace_ref
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ChatTurn":
        return cls(
            role=Role(d["role"]),
            content=d["content"],
            timestamp=d["timestamp"],
            trace_ref=d.get("trace_ref"),
        )


@dataclass
class Session:
    session_id: str
    turns: list[ChatTurn] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "created_at": self.created_at,
            "turns": [t.to_dict() for t in self.turns],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        return cls(
            session_id=d["session_id"],
            created_at=d["created_at"],
            turns=[ChatTurn.from_dict(t) for t in d["turns"]],
        )


@dataclass
class RouteDecision:
    route: Route
    raw_model_output: str
    parse_status: ParseStatus
    decision_latency: float

    def to_dict(self) -> dict:
        return {
            "route": self.route.value,
            "raw_model_output": self.raw_model_output,
            "parse_status": self.parse_status.value,
            "decision_latency": self.decision_latency,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RouteDecision":
        return cls(
            route=Route(d["route"]),
            raw_model_output=d["raw_model_output"],
            parse_status=ParseStatus(d["parse_status"]),
            decision_latency=d["decision_latency"],
        )


@dataclass
class TracedToolCall:
    """One executed tool call inside a turn: call, observation, owning step, elapsed time."""

    tool_name: str
    arguments: dict
    call_id: str
    status: str
    content: str
    step_index: int
    latency: float
    structured: Optional[dict] = None

    def to_dict(self) -> dict:
        d: dict[str, Any] = {
            "tool_name": self.tool_name,
            "arguments": self.arguments,
            "call_id": self.call_id,
            "status": self.status,
            "content": self.content,
            "step_index": self.step_index,
            "latency": self.latency,
        }
        if self.structured is not None:
            d["structured"] = self.structured
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TracedToolCall":
        return cls(
            tool_name=d["tool_name"],
            arguments=d["arguments"],
            call_id=d["call_id"],
            status=d["status"],
            content=d["content"],
            step_index=d["step_index"],
            latency=d["latency"],
            structured=d.get("structured"),
        )


@dataclass
class TracedHit:
    """Retrieval hit as recorded in a trace (chunk text kept for UI display)."""

    chunk_id: str
    score: float
    rank: int
    text: str

    def to_dict(self) -> dict:
        return {"chunk_id": self.chunk_id, "score": self.score, "rank": self.rank, "text": self.text}

    @classmethod
    def from_dict(cls, d: dict) -> "TracedHit":
        return cls(chunk_id=d["chunk_id"], score=d["score"], rank=d["rank"], text=d["text"])


@dataclass
class TurnTrace:
    route_decision: RouteDecision
    retrieval_hits: list[TracedHit]
    tool_calls: list[TracedToolCall]
    total_latency: float
    answer: str

    def to_dict(self) -> dict:
        return {
            "route_decision": self.route_decision.to_dict(),
            "retrieval_hits": [h.to_dict() for h in self.retrieval_hits],
            "tool_calls": [c.to_dict() for c in self.tool_calls],
            "total_latency": self.total_latency,
            "answer": self.answer,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TurnTrace":
        return cls(
            route_decision=RouteDecision.from_dict(d["route_decision"]),
            retrieval_hits=[TracedHit.from_dict(h) for h in d["retrieval_hits"]],
            tool_calls=[TracedToolCall.from_dict(c) for c in d["tool_calls"]],
            total_latency=d["total_latency"],
            answer=d["answer"],
        )


def append_turn(session: Session, turn: ChatTurn) -> Session:
    """Append a user or assistant turn, enforcing the no-two-user-turns rule.

    Mutates and returns the same session so call sites can chain.
    """
    if turn.role not in (Role.USER, Role.ASSISTANT):
        raise ValueError(f"only user/assistant turns may be appended, got {turn.role.value}")
    if (
        turn.role is Role.USER
        and session.turns
        and session.turns[-1].role is Role.USER
    ):
        raise ConsecutiveUserTurns(
            f"session {session.session_id}: user turn after user turn"
        )
    session.turns.append(turn)
    return session


def render_history(session: Session, max_turns: int = DEFAULT_HISTORY_TURNS) -> str:
    """Serialize the last ``max_turns`` turns as "role: content" lines, oldest first."""
    if max_turns < 1:
        raise ValueError("max_turns must be >= 1")
    window = session.turns[-max_turns:]
    return "\n".join(f"{t.role.value}: {t.content}" for t in window)
