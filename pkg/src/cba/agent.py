"""Multi-step agent loop: interleaved reasoning and tool execution until a final answer.

The model output grammar is fixed and backend-agnostic (see docs/agent-protocol.md):

    THOUGHT: <free text, may span lines>
    ACTION: <tool_name> {"arg": value, ...}     (one line per call; lines form one batch)
  or
    FINAL: <answer text to the user>

Prose outside the markers is tolerated and ignored. Termination is guaranteed:
at most ``max_steps`` reasoning calls plus one forced-finalization call.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import AgentUnavailable, BackendError
from .gateway import ChatRequest, ChatResponse, Gateway
from .tools import Observation, ToolCall, ToolCatalog, execute, validate_call

DEFAULT_MAX_STEPS = 8

DEFAULT_GUIDING_PROMPT = """\
You are a compliance assistant for enterprise personnel. Work the way an \
experienced compliance reviewer would:
- If the user gives an artifact id, fetch it directly with fetch_artifact.
- If no id is known, use search_artifacts before fetching anything.
- For conceptual or policy questions, prefer retrieve_knowledge.
- For questions inside a configured specialist domain, consult ask_specialist.
- Batch tool calls only when they do not depend on each other's output.
- Stop and answer as soon as the gathered evidence is sufficient; ground every \
claim in an observation."""

OUTPUT_GRAMMAR = """\
Respond using exactly this format:
THOUGHT: your reasoning about what is needed next
ACTION: tool_name {"argument": "value"}
Emit one ACTION line per tool call; multiple ACTION lines in one reply run \
concurrently, so they must not depend on each other. When you can answer, \
reply instead with:
THOUGHT: your reasoning
FINAL: the answer for the user"""

FORMAT_FEEDBACK = (
    "output did not match the required format; reply with THOUGHT: followed by "
    "ACTION: lines or a FINAL: block"
)

FORCED_FINAL_INSTRUCTION = (
    "Answer now using the evidence gathered so far. Reply with the answer text only."
)

FALLBACK_ANSWER = (
    "I could not assemble a grounded answer for this question from the available "
    "tools and knowledge. Please rephrase or narrow the request."
)

_ACTION_RE = re.compile(r"^ACTION:\s*([A-Za-z_][A-Za-z0-9_]*)\s*(\{.*\})\s*$")
_THOUGHT_RE = re.compile(r"^THOUGHT:\s*(.*)$")
_FINAL_RE = re.compile(r"^FINAL:\s*(.*)$")


@dataclass
class AgentConfig:
    profile_name: str
    guiding_prompt: str = DEFAULT_GUIDING_PROMPT
    max_steps: int = DEFAULT_MAX_STEPS
    stop_on_repeat: bool = True

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass
class AgentStep:
    index: int
    thought: str
    batch: Optional[list[ToolCall]] = None
    final_answer: Optional[str] = None
    observations: list[Observation] = field(default_factory=list)

    def __post_init__(self):
        if (self.batch is None) == (self.final_answer is None):
            raise ValueError("a step is either a tool batch or a final answer")

    def to_dict(self) -> dict:
        d: dict = {"index": self.index, "thought": self.thought}
        if self.final_answer is not None:
            d["final_answer"] = self.final_answer
        else:
            d["batch"] = [c.to_dict() for c in self.batch or []]
            d["observations"] = [o.to_dict() for o in self.observations]
        return d


@dataclass
class ParsedOutput:
    thought: str
    batch: Optional[list[ToolCall]] = None
    final_answer: Optional[str] = None


@dataclass
class ParseFailure:
    raw_text: str
    reason: str


def parse_agent_output(text: str) -> Union[ParsedOutput, ParseFailure]:
    """Extract (thought, action) from a model reply; line-anchored markers only."""
    thought_lines: list[str] = []
    actions: list[tuple[str, str]] = []
    final_lines: list[str] = []
    mode = None  # which block trailing unmarked lines extend
    for line in text.splitlines():
        m = _ACTION_RE.match(line)
        if m:
            actions.append((m.group(1), m.group(2)))
            mode = None
            continue
        m = _FINAL_RE.match(line)
        if m:
            final_lines.append(m.group(1))
            mode = "final"
            continue
        m = _THOUGHT_RE.match(line)
        if m:
            thought_lines.append(m.group(1))
            mode = "thought"
            continue
        if mode == "final":
            final_lines.append(line)
        elif mode == "thought" and line.strip():
            thought_lines.append(line)

    thought = "\n".join(thought_lines).strip()
    if actions and final_lines:
        return ParseFailure(text, "both ACTION and FINAL present")
    if actions:
        batch = []
        for name, raw_args in actions:
            try:
                args = json.loads(raw_args)
            except json.JSONDecodeError:
                return ParseFailure(text, f"ACTION arguments for {name} are not valid JSON")
            if not isinstance(args, dict):
                return ParseFailure(text, f"ACTION arguments for {name} must be a JSON object")
            batch.append(ToolCall(tool_name=name, arguments=args))
        return ParsedOutput(thought=thought, batch=batch)
    if final_lines:
        return ParsedOutput(thought=thought, final_answer="\n".join(final_lines).strip())
    return ParseFailure(text, "no ACTION or FINAL marker found")


def render_agent_prompt(
    config: AgentConfig,
    catalog: ToolCatalog,
    query: str,
    history: str,
    prior_steps: list[AgentStep],
    pending_feedback: Optional[list[str]] = None,
) -> list[tuple[str, str]]:
    """Deterministic prompt: guidance + tool specs + grammar, then the running trace."""
    system = "\n\n".join(
        [config.guiding_prompt, "Available tools:\n" + catalog.render_specs(), OUTPUT_GRAMMAR]
    )
    messages: list[tuple[str, str]] = [("system", system)]
    user = f"History:\n{history}\n\nQuestion: {query}" if history else f"Question: {query}"
    messages.append(("user", user))
    for step in prior_steps:
        lines = [f"THOUGHT: {step.thought}"]
        for call in step.batch or []:
            lines.append(f"ACTION: {call.tool_name} {json.dumps(call.arguments, sort_keys=True)}")
        messages.append(("assistant", "\n".join(lines)))
        obs_lines = [
            f"OBSERVATION {i} [{o.status}]: {o.content}"
            for i, o in enumerate(step.observations, start=1)
        ]
        messages.append(("tool", "\n".join(obs_lines)))
    for feedback in pending_feedback or []:
        messages.append(("tool", f"OBSERVATION [format]: {feedback}"))
    return messages


def _batches_equal(a: list[ToolCall], b: list[ToolCall]) -> bool:
    if len(a) != len(b):
        return False
    return all(
        x.tool_name == y.tool_name and x.arguments == y.arguments for x, y in zip(a, b)
    )


def run_agent(
    config: AgentConfig,
    catalog: ToolCatalog,
    gateway: Gateway,
    query: str,
    history: str = "",
) -> tuple[str, list[AgentStep]]:
    """Drive the reasoning/action loop to a final answer.

    Guarantees: at most ``config.max_steps`` reasoning calls plus one forced
    finalization; a malformed reply gets one corrective retry; an immediately
    repeated batch (when ``stop_on_repeat``) forces finalization.
    """
    if not query:
        raise ValueError("query must be non-empty")
    steps: list[AgentStep] = []
    pending_feedback: list[str] = []
    consecutive_failures = 0
    last_raw_batch: Optional[list[ToolCall]] = None

    def complete(messages: list[tuple[str, str]]) -> ChatResponse:
        try:
            return gateway.complete(ChatRequest(messages=messages, profile_name=config.profile_name))
        except BackendError as e:
            raise AgentUnavailable(str(e), partial_steps=steps) from e

    for _ in range(config.max_steps):
        prompt = render_agent_prompt(config, catalog, query, history, steps, pending_feedback)
        reply = complete(prompt)
        parsed = parse_agent_output(reply.content)

        if isinstance(parsed, ParseFailure):
            consecutive_failures += 1
            if consecutive_failures >= 2:
                break
            pending_feedback = [FORMAT_FEEDBACK]
            continue
        consecutive_failures = 0
        pending_feedback = []

        if parsed.final_answer is not None:
            answer = parsed.final_answer or FALLBACK_ANSWER
            steps.append(
                AgentStep(
                    index=len(steps) + 1, thought=parsed.thought, final_answer=answer
                )
            )
            return answer, steps

        batch = parsed.batch or []
        if (
            config.stop_on_repeat
            and last_raw_batch is not None
            and _batches_equal(batch, last_raw_batch)
        ):
            break
        last_raw_batch = [ToolCall(c.tool_name, dict(c.arguments), c.call_id) for c in batch]

        checked: list[ToolCall] = []
        observations: list[Observation] = []
        to_execute: list[ToolCall] = []
        placeholders: list[int] = []
        for i, call in enumerate(batch):
            result = validate_call(catalog, call)
            if isinstance(result, Observation):
                checked.append(call)
                observations.append(result)
            else:
                checked.append(result)
                observations.append(None)  # type: ignore[arg-type]
                to_execute.append(result)
                placeholders.append(i)
        executed = execute(catalog, to_execute)
        for slot, obs in zip(placeholders, executed):
            observations[slot] = obs
        steps.append(
            AgentStep(
                index=len(steps) + 1,
                thought=parsed.thought,
                batch=checked,
                observations=observations,
            )
        )

    # Forced finalization: one last call asking for the answer outright.
    prompt = render_agent_prompt(config, catalog, query, history, steps, pending_feedback)
    prompt.append(("tool", f"OBSERVATION [final]: {FORCED_FINAL_INSTRUCTION}"))
    reply = complete(prompt)
    answer = reply.content.strip() or FALLBACK_ANSWER
    return answer, steps
