"""The agent's tool catalog: uniform specs, argument validation, concurrent execution.

Validation failures come back as error observations rather than exceptions so
the agent can read them and self-correct. All bundled tools are read-only.
"""

from __future__ import annotations

import concurrent.futures as cf
import json
import time
import uuid
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import artifacts as artifact_ops
from .artifacts import ArtifactStore
from .errors import ArtifactNotFound, CbaError, ConfigError, EmptyIndex
from .gateway import ChatRequest, Gateway
from .retrieval import Index, search

DEFAULT_K = 5
DEFAULT_FANOUT = 4
DEFAULT_CALL_TIMEOUT = 10.0
OBSERVATION_CHAR_CAP = 4000
TRUNCATION_SUFFIX = "…[truncated]"

_TYPE_CHECKS = {
    "string": lambda v: isinstance(v, str),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "boolean": lambda v: isinstance(v, bool),
}


@dataclass
class ToolParam:
    name: str
    type: str  # string | integer | boolean
    required: bool
    description: str
    default: object = None


@dataclass
class ToolSpec:
    name: str
    description: str
    parameters: list[ToolParam]
    usage_examples: list[tuple[str, str]]  # (example call, when to use)

    def signature(self) -> str:
        parts = []
        for p in self.parameters:
            mark = "" if p.required else "?"
            parts.append(f"{p.name}{mark}: {p.type}")
        return f"{self.name}({', '.join(parts)})"


@dataclass
class ToolCall:
    tool_name: str
    arguments: dict
    call_id: str = field(default_factory=lambda: uuid.uuid4().hex[:12])

    def to_dict(self) -> dict:
        return {"tool_name": self.tool_name, "arguments": self.arguments, "call_id": self.call_id}


@dataclass
class Observation:
    call_id: str
    status: str  # ok | error
    content: str
    structured: Optional[dict] = None
    elapsed: float = 0.0

    def to_dict(self) -> dict:
        d = {"call_id": self.call_id, "status": self.status, "content": self.content}
        if self.structured is not None:
            d["structured"] = self.structured
        return d


def _truncate(content: str, cap: int) -> str:
    if len(content) <= cap:
        return content
    # Keep the machine-readable error-code prefix intact even for tiny caps.
    head = content.split(":", 1)[0] + ":" if ":" in content[:40] else ""
    body_room = max(cap - len(TRUNCATION_SUFFIX), len(head))
    return content[:body_room] + TRUNCATION_SUFFIX


def error_observation(call_id: str, code: str, message: str, elapsed: float = 0.0) -> Observation:
    return Observation(call_id=call_id, status="error", content=f"{code}: {message}", elapsed=elapsed)


class ToolCatalog:
    def __init__(self, content_cap: int = OBSERVATION_CHAR_CAP, fanout: int = DEFAULT_FANOUT,
                 call_timeout: float = DEFAULT_CALL_TIMEOUT):
        self._specs: dict[str, ToolSpec] = {}
        self._impls: dict[str, Callable[..., tuple[str, Optional[dict]]]] = {}
        self.content_cap = content_cap
        self.fanout = fanout
        self.call_timeout = call_timeout

    def register(self, spec: ToolSpec, impl: Callable[..., tuple[str, Optional[dict]]]) -> None:
        if spec.name in self._specs:
            raise ConfigError(f"tool {spec.name!r} registered twice")
        for p in spec.parameters:
            if p.type not in _TYPE_CHECKS:
                raise ConfigError(f"tool {spec.name}: unsupported parameter type {p.type!r}")
        if not spec.usage_examples:
            raise ConfigError(f"tool {spec.name}: at least one usage example required")
        self._specs[spec.name] = spec
        self._impls[spec.name] = impl

    def names(self) -> list[str]:
        return list(self._specs)

    def spec(self, name: str) -> ToolSpec:
        return self._specs[name]

    def render_specs(self) -> str:
        """Stable textual schema handed to the agent prompt (golden-file tested)."""
        blocks = []
        for spec in self._specs.values():
            lines = [f"{spec.signature()}: {spec.description}"]
            for p in spec.parameters:
                req = "required" if p.required else f"optional, default {p.default!r}"
                lines.append(f"  - {p.name} ({p.type}, {req}): {p.description}")
            for call, when in spec.usage_examples:
                lines.append(f"  example: {call}")
                lines.append(f"    when: {when}")
            blocks.append("\n".join(lines))
        return "\n\n".join(blocks)


def validate_call(catalog: ToolCatalog, call: ToolCall) -> ToolCall | Observation:
    """Check tool existence, required args, types, unknown keys; fill defaults.

    Returns a normalized ToolCall, or an error Observation the agent can react to.
    """
    spec = catalog._specs.get(call.tool_name)
    if spec is None:
        return error_observation(
            call.call_id, "UNKNOWN_TOOL",
            f"no tool named {call.tool_name!r}; available: {', '.join(catalog.names())}",
        )
    by_name = {p.name: p for p in spec.parameters}
    for key in call.arguments:
        if key not in by_name:
            return error_observation(
                call.call_id, "UNKNOWN_ARGUMENT",
                f"{call.tool_name} does not accept {key!r}",
            )
    normalized = dict(call.arguments)
    for p in spec.parameters:
        if p.name not in normalized:
            if p.required:
                return error_observation(
                    call.call_id, "MISSING_ARGUMENT",
                    f"{call.tool_name} requires {p.name!r}",
                )
            if p.default is not None:
                normalized[p.name] = p.default
            continue
        if not _TYPE_CHECKS[p.type](normalized[p.name]):
            return error_observation(
                call.call_id, "BAD_ARGUMENT_TYPE",
                f"{call.tool_name}.{p.name} must be a {p.type}, "
                f"got {type(normalized[p.name]).__name__}",
            )
    return ToolCall(tool_name=call.tool_name, arguments=normalized, call_id=call.call_id)


def _run_one(catalog: ToolCatalog, call: ToolCall) -> Observation:
    start = time.monotonic()
    try:
        content, structured = catalog._impls[call.tool_name](**call.arguments)
        elapsed = time.monotonic() - start
        return Observation(
            call_id=call.call_id,
            status="ok",
            content=_truncate(content, catalog.content_cap),
            structured=structured,
            elapsed=elapsed,
        )
    except ArtifactNotFound as e:
        return error_observation(call.call_id, "ARTIFACT_NOT_FOUND", str(e),
                                 elapsed=time.monotonic() - start)
    except EmptyIndex as e:
        return error_observation(call.call_id, "EMPTY_INDEX", str(e),
                                 elapsed=time.monotonic() - start)
    except CbaError as e:
        return error_observation(call.call_id, "TOOL_ERROR", str(e),
                                 elapsed=time.monotonic() - start)
    except Exception as e:  # fault isolation: a buggy tool must not kill the batch
        return error_observation(call.call_id, "TOOL_ERROR", f"{type(e).__name__}: {e}",
                                 elapsed=time.monotonic() - start)


def execute(catalog: ToolCatalog, calls: list[ToolCall]) -> list[Observation]:
    """Run a batch of independent calls concurrently; observations in input order.

    A call overrunning the per-call timeout yields an error observation; the
    batch itself always returns normally.
    """
    if not calls:
        return []
    observations: list[Optional[Observation]] = [None] * len(calls)
    pool = cf.ThreadPoolExecutor(max_workers=min(catalog.fanout, len(calls)))
    try:
        futures = [pool.submit(_run_one, catalog, call) for call in calls]
        for i, (call, future) in enumerate(zip(calls, futures)):
            try:
                observations[i] = future.result(timeout=catalog.call_timeout)
            except cf.TimeoutError:
                observations[i] = error_observation(
                    call.call_id, "TIMEOUT",
                    f"{call.tool_name} exceeded {catalog.call_timeout}s",
                    elapsed=catalog.call_timeout,
                )
    finally:
        # Never block on a hung tool; its thread is abandoned, the batch returns.
        pool.shutdown(wait=False, cancel_futures=True)
    return observations  # type: ignore[return-value]


def catalog_default(
    store: ArtifactStore,
    index: Index,
    gateway: Gateway,
    specialist_domains: Optional[list[str]] = None,
    content_cap: int = OBSERVATION_CHAR_CAP,
    fanout: int = DEFAULT_FANOUT,
    call_timeout: float = DEFAULT_CALL_TIMEOUT,
) -> ToolCatalog:
    """The stock catalog: artifact fetch/search/related, knowledge retrieval,
    and one specialist-consultation tool when specialist domains are configured."""
    domains = specialist_domains or []
    for domain in domains:
        if not gateway.has_profile(f"specialist:{domain}"):
            raise ConfigError(f"specialist domain {domain!r} has no gateway profile")

    catalog = ToolCatalog(content_cap=content_cap, fanout=fanout, call_timeout=call_timeout)

    def fetch_artifact(artifact_id: str) -> tuple[str, dict]:
        artifact = artifact_ops.get_artifact(store, artifact_id)
        return json.dumps(artifact.to_dict(), indent=2), artifact.to_dict()

    def do_search_artifacts(query: str, k: int = DEFAULT_K) -> tuple[str, dict]:
        hits = artifact_ops.search_artifacts(store, query, k)
        if not hits:
            return "no artifacts matched", {"results": []}
        lines = [
            f"{a.artifact_id} [{a.kind}] {a.name} (owner: {a.owner}, score {score:.3f})"
            for a, score in hits
        ]
        return "\n".join(lines), {"results": [a.to_dict() for a, _ in hits]}

    def do_related_artifacts(artifact_id: str, k: int = DEFAULT_K) -> tuple[str, dict]:
        related = artifact_ops.related_artifacts(store, artifact_id, k)
        if not related:
            return "no related artifacts", {"results": []}
        lines = [f"{a.artifact_id} [{a.kind}] {a.name} (owner: {a.owner})" for a in related]
        return "\n".join(lines), {"results": [a.to_dict() for a in related]}

    def retrieve_knowledge(query: str, k: int = DEFAULT_K) -> tuple[str, dict]:
        hits = search(index, query, k, gateway=gateway)
        lines = [f"[{h.rank}] ({h.chunk.chunk_id}) {h.chunk.text}" for h in hits]
        return "\n".join(lines), {
            "results": [
                {"chunk_id": h.chunk.chunk_id, "score": h.score, "rank": h.rank}
                for h in hits
            ]
        }

    def ask_specialist(domain: str, question: str) -> tuple[str, None]:
        if domain not in domains:
            raise CbaError(
                f"unknown specialist domain {domain!r}; configured: {', '.join(domains)}"
            )
        response = gateway.complete(
            ChatRequest(messages=[("user", question)], profile_name=f"specialist:{domain}")
        )
        return response.content, None

    catalog.register(
        ToolSpec(
            name="fetch_artifact",
            description="Fetch the full record of one compliance artifact by its exact id.",
            parameters=[
                ToolParam("artifact_id", "string", True, "Exact id, e.g. ART-000."),
            ],
            usage_examples=[
                (
                    'fetch_artifact {"artifact_id": "ART-000"}',
                    "The user names or implies a specific artifact id.",
                )
            ],
        ),
        fetch_artifact,
    )
    catalog.register(
        ToolSpec(
            name="search_artifacts",
            description="Find artifacts whose name, description, owner, or attributes match a text query.",
            parameters=[
                ToolParam("query", "string", True, "Free-text description of the entity."),
                ToolParam("k", "integer", False, "Maximum results.", default=DEFAULT_K),
            ],
            usage_examples=[
                (
                    'search_artifacts {"query": "messaging retention review"}',
                    "No id is known; locate candidate artifacts by description.",
                )
            ],
        ),
        do_search_artifacts,
    )
    catalog.register(
        ToolSpec(
            name="related_artifacts",
            description="List artifacts linked to or textually similar to a given artifact.",
            parameters=[
                ToolParam("artifact_id", "string", True, "Anchor artifact id."),
                ToolParam("k", "integer", False, "Maximum results.", default=DEFAULT_K),
            ],
            usage_examples=[
                (
                    'related_artifacts {"artifact_id": "ART-000"}',
                    "The user asks what else is connected to an artifact they mentioned.",
                )
            ],
        ),
        do_related_artifacts,
    )
    catalog.register(
        ToolSpec(
            name="retrieve_knowledge",
            description="Search the compliance knowledge corpus for relevant passages.",
            parameters=[
                ToolParam("query", "string", True, "Topic or question to look up."),
                ToolParam("k", "integer", False, "Maximum passages.", default=DEFAULT_K),
            ],
            usage_examples=[
                (
                    'retrieve_knowledge {"query": "data retention period"}',
                    "A conceptual or policy question needs supporting passages.",
                )
            ],
        ),
        retrieve_knowledge,
    )
    if domains:
        catalog.register(
            ToolSpec(
                name="ask_specialist",
                description=(
                    "Consult a domain-specialist model. Configured domains: "
                    + ", ".join(domains) + "."
                ),
                parameters=[
                    ToolParam("domain", "string", True, "One of the configured domains."),
                    ToolParam("question", "string", True, "Question for the specialist."),
                ],
                usage_examples=[
                    (
                        f'ask_specialist {{"domain": "{domains[0]}", "question": "..."}}',
                        "The question falls squarely in a configured specialist domain.",
                    )
                ],
            ),
            ask_specialist,
        )
    return catalog
