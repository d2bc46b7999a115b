"""Per-query classifier deciding between the FastTrack and FullAgentic paths.

A criteria statement plus in-context example queries go to a lightweight model
profile; the reply is parsed by token search so any reply resolves to a route
(fallback on ambiguity). Includes the evaluation protocol over a labeled query
set: confusion matrix, per-class precision/recall, accuracy, mean latency.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .core import ParseStatus, Route, RouteDecision
from .errors import BackendError, ConfigError, RouterUnavailable
from .gateway import ChatRequest, Gateway

OUTPUT_INSTRUCTION = "Answer with exactly one token: FastTrack or FullAgentic."

DEFAULT_CRITERIA = (
    "Route to FullAgentic when the query requires information about any "
    "internal artifact (a specific review, policy record, dataset, or system, "
    "whether referenced by id, name, or description); otherwise route to "
    "FastTrack."
)


@dataclass
class RouterConfig:
    criteria_text: str = DEFAULT_CRITERIA
    examples: list[tuple[str, Route]] = field(default_factory=list)
    fallback: Route = Route.FULLAGENTIC
    profile_name: str = "router"

    def __post_init__(self):
        if not self.criteria_text:
            raise ConfigError("router criteria_text must be non-empty")
        if self.examples:
            labels = {label for _, label in self.examples}
            if labels != {Route.FASTTRACK, Route.FULLAGENTIC}:
                raise ConfigError("router examples must cover both labels")

    @classmethod
    def from_dict(cls, d: dict) -> "RouterConfig":
        return cls(
            criteria_text=d.get("criteria_text", DEFAULT_CRITERIA),
            examples=[(e["query"], Route(e["label"])) for e in d.get("examples", [])],
            fallback=Route(d.get("fallback", Route.FULLAGENTIC.value)),
            profile_name=d.get("profile_name", "router"),
        )


@dataclass
class LabeledQuerySet:
    items: list[tuple[str, Route]]

    def __post_init__(self):
        queries = [q for q, _ in self.items]
        if len(queries) != len(set(queries)):
            raise ConfigError("labeled query set contains duplicate queries")

    @classmethod
    def load_jsonl(cls, path: str | Path) -> "LabeledQuerySet":
        items = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            items.append((obj["query"], Route(obj["expected"])))
        return cls(items)


def build_router_prompt(
    config: RouterConfig, query: str, history: str = ""
) -> list[tuple[str, str]]:
    """System message: criteria, examples in config order, output instruction."""
    if not query:
        raise ValueError("query must be non-empty")
    lines = [config.criteria_text]
    if config.examples:
        lines.append("")
        lines.append("Examples:")
        for q, label in config.examples:
            lines.append(f"Query: {q}\nLabel: {label.value}")
    lines.append("")
    lines.append(OUTPUT_INSTRUCTION)
    system = "\n".join(lines)
    user = f"History:\n{history}\n\nQuery: {query}" if history else f"Query: {query}"
    return [("system", system), ("user", user)]


def parse_route_reply(reply: str, fallback: Route) -> tuple[Route, ParseStatus]:
    """Case-insensitive token search; exactly one label present wins, anything else falls back."""
    lowered = reply.lower()
    has_fast = Route.FASTTRACK.value.lower() in lowered
    has_full = Route.FULLAGENTIC.value.lower() in lowered
    if has_fast and not has_full:
        return Route.FASTTRACK, ParseStatus.PARSED
    if has_full and not has_fast:
        return Route.FULLAGENTIC, ParseStatus.PARSED
    return fallback, ParseStatus.FALLBACK


def route(
    config: RouterConfig, gateway: Gateway, query: str, history: str = ""
) -> RouteDecision:
    messages = build_router_prompt(config, query, history)
    try:
        response = gateway.complete(
            ChatRequest(messages=messages, profile_name=config.profile_name)
        )
    except BackendError as e:
        raise RouterUnavailable(str(e)) from e
    decided, status = parse_route_reply(response.content, config.fallback)
    return RouteDecision(
        route=decided,
        raw_model_output=response.content,
        parse_status=status,
        decision_latency=response.latency,
    )


@dataclass
class RouterEvalReport:
    # Confusion cells keyed (actual, predicted).
    cells: dict[tuple[Route, Route], int]
    precision: dict[Route, Optional[float]]
    recall: dict[Route, Optional[float]]
    accuracy: Optional[float]
    avg_latency: float
    total: int
    errors: int

    def to_dict(self) -> dict:
        return {
            "confusion": {
                f"{a.value}/{p.value}": n for (a, p), n in sorted(
                    self.cells.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)
                )
            },
            "precision": {r.value: v for r, v in self.precision.items()},
            "recall": {r.value: v for r, v in self.recall.items()},
            "accuracy": self.accuracy,
            "avg_latency": self.avg_latency,
            "total": self.total,
            "errors": self.errors,
        }


def evaluate_router(
    config: RouterConfig,
    gateway: Gateway,
    query_set: LabeledQuerySet,
    concurrency: int = 4,
) -> RouterEvalReport:
    """Classify every query in isolation (empty history) and score against labels.

    Backend failures are tallied separately and excluded from metric denominators.
    """
    if not query_set.items:
        raise ValueError("query set is empty")

    def classify(item: tuple[str, Route]):
        query, expected = item
        try:
            decision = route(config, gateway, query, history="")
            return expected, decision.route, decision.decision_latency, None
        except RouterUnavailable as e:
            return expected, None, 0.0, e

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        outcomes = list(pool.map(classify, query_set.items))

    cells = {
        (a, p): 0 for a in (Route.FASTTRACK, Route.FULLAGENTIC)
        for p in (Route.FASTTRACK, Route.FULLAGENTIC)
    }
    latencies: list[float] = []
    errors = 0
    for expected, predicted, latency, err in outcomes:
        if err is not None:
            errors += 1
            continue
        cells[(expected, predicted)] += 1
        latencies.append(latency)

    def ratio(num: int, denom: int) -> Optional[float]:
        return num / denom if denom else None

    precision = {}
    recall = {}
    for r in (Route.FASTTRACK, Route.FULLAGENTIC):
        other = Route.FULLAGENTIC if r is Route.FASTTRACK else Route.FASTTRACK
        precision[r] = ratio(cells[(r, r)], cells[(r, r)] + cells[(other, r)])
        recall[r] = ratio(cells[(r, r)], cells[(r, r)] + cells[(r, other)])
    counted = sum(cells.values())
    accuracy = ratio(
        cells[(Route.FASTTRACK, Route.FASTTRACK)] + cells[(Route.FULLAGENTIC, Route.FULLAGENTIC)],
        counted,
    )
    avg_latency = sum(latencies) / len(latencies) if latencies else 0.0
    return RouterEvalReport(
        cells=cells,
        precision=precision,
        recall=recall,
        accuracy=accuracy,
        avg_latency=avg_latency,
        total=len(query_set.items),
        errors=errors,
    )


def render_router_report(report: RouterEvalReport, model_label: str = "router") -> str:
    """Three aligned blocks: confusion matrix, classification metrics, latency."""

    def pct(v: Optional[float]) -> str:
        return f"{v * 100:.1f}%" if v is not None else "n/a"

    fast, full = Route.FASTTRACK, Route.FULLAGENTIC
    rows1 = [
        ("Actual/Predicted", model_label),
        ("FastTrack/FastTrack", str(report.cells[(fast, fast)])),
        ("FastTrack/FullAgentic", str(report.cells[(fast, full)])),
        ("FullAgentic/FastTrack", str(report.cells[(full, fast)])),
        ("FullAgentic/FullAgentic", str(report.cells[(full, full)])),
    ]
    rows2 = [
        ("Class", model_label),
        ("FastTrack Precision", pct(report.precision[fast])),
        ("FastTrack Recall", pct(report.recall[fast])),
        ("FullAgentic Precision", pct(report.precision[full])),
        ("FullAgentic Recall", pct(report.recall[full])),
        ("Overall Accuracy", pct(report.accuracy)),
    ]
    rows3 = [
        ("Model", model_label),
        ("Latency (s)", f"{report.avg_latency:.2f}"),
    ]

    def block(title: str, rows: list[tuple[str, str]]) -> str:
        width = max(len(label) for label, _ in rows)
        lines = [title]
        lines.extend(f"{label.ljust(width)}  {value}" for label, value in rows)
        return "\n".join(lines)

    parts = [
        block("(a) Confusion matrix", rows1),
        block("(b) Classification metrics", rows2),
        block("(c) Average latency per request", rows3),
    ]
    if report.errors:
        parts.append(f"backend errors: {report.errors} of {report.total} queries excluded")
    return "\n\n".join(parts)
