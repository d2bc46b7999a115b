"""Single entry point for every model interaction: chat completions and embeddings.

Profiles name a backend (a chat-completions HTTP endpoint or the built-in
scripted mock) plus sampling parameters. With only mock profiles configured,
everything in this package runs offline and deterministically.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

import httpx

from .errors import BackendTimeout, BackendUnavailable, ConfigError

DEFAULT_EMBEDDING_DIM = 64
DEFAULT_PROFILE_CONCURRENCY = 8


@dataclass
class ModelProfile:
    profile_name: str
    endpoint: str  # URL of a chat-completions server, or "mock"
    model_id: str
    temperature: float = 0.0
    max_output_tokens: int = 1024
    timeout: float = 30.0
    mock_script_path: Optional[str] = None
    embedding_dim: int = DEFAULT_EMBEDDING_DIM

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 2.0:
            raise ConfigError(f"profile {self.profile_name}: temperature must be in [0, 2]")
        if self.timeout <= 0:
            raise ConfigError(f"profile {self.profile_name}: timeout must be > 0")

    @property
    def is_mock(self) -> bool:
        return self.endpoint == "mock"


@dataclass
class ChatRequest:
    messages: list[tuple[str, str]]  # (role, content)
    profile_name: str

    def __post_init__(self):
        if not self.messages:
            raise ValueError("ChatRequest needs at least one message")

    def rendered(self) -> str:
        """Flat text view of the request, used for mock-rule matching."""
        return "\n".join(f"{role}: {content}" for role, content in self.messages)


@dataclass
class ChatResponse:
    content: str
    latency: float
    token_usage: Optional[tuple[int, int]] = None  # (prompt_tokens, completion_tokens)


@dataclass
class MockRule:
    """First-match-wins rule: substring or regex over the rendered request."""

    response: str
    contains: Optional[str] = None
    regex: Optional[str] = None
    delay: float = 0.0

    def matches(self, rendered: str) -> bool:
        if self.contains is not None:
            return self.contains in rendered
        if self.regex is not None:
            return re.search(self.regex, rendered) is not None
        return False


@dataclass
class MockScript:
    rules: list[MockRule] = field(default_factory=list)
    default_response: str = ""
    default_delay: float = 0.0

    def respond(self, rendered: str) -> tuple[str, float]:
        for rule in self.rules:
            if rule.matches(rendered):
                return rule.response, rule.delay
        return self.default_response, self.default_delay

    @classmethod
    def from_dict(cls, d: dict) -> "MockScript":
        rules = []
        for r in d.get("rules", []):
            rules.append(
                MockRule(
                    response=r["response"],
                    contains=r.get("contains"),
                    regex=r.get("regex"),
                    delay=float(r.get("delay", 0.0)),
                )
            )
        return cls(
            rules=rules,
            default_response=d.get("default_response", ""),
            default_delay=float(d.get("default_delay", 0.0)),
        )

    @classmethod
    def load(cls, path: str) -> "MockScript":
        with open(path, encoding="utf-8") as f:
            return cls.from_dict(json.load(f))


def mock_embedding(text: str, dim: int = DEFAULT_EMBEDDING_DIM) -> list[float]:
    """Deterministic unit-norm vector: dimension i is derived from sha256(text|i).

    Stand-in for a real embedding model; similar texts do NOT get similar
    vectors, which is fine for the offline pipelines that only need shape,
    determinism, and normalization.
    """
    raw = []
    for i in range(dim):
        digest = hashlib.sha256(f"{text}|{i}".encode("utf-8")).digest()
        value = int.from_bytes(digest[:8], "big")
        raw.append(value / 2**63 - 1.0)  # map to [-1, 1)
    norm = math.sqrt(sum(v * v for v in raw))
    if norm == 0.0:
        raw[0] = 1.0
        norm = 1.0
    return [v / norm for v in raw]


class Gateway:
    """Thread-safe dispatcher from profile names to backends.

    Concurrent calls on distinct requests proceed in parallel; per-profile
    concurrency is capped by a semaphore (default 8).
    """

    def __init__(
        self,
        profiles: list[ModelProfile],
        profile_concurrency: int = DEFAULT_PROFILE_CONCURRENCY,
    ):
        self._profiles: dict[str, ModelProfile] = {}
        for p in profiles:
            if p.profile_name in self._profiles:
                raise ConfigError(f"duplicate profile name: {p.profile_name}")
            self._profiles[p.profile_name] = p
        self._scripts: dict[str, MockScript] = {}
        self._semaphores = {
            name: threading.Semaphore(profile_concurrency) for name in self._profiles
        }
        for p in profiles:
            if p.is_mock:
                if p.mock_script_path:
                    self._scripts[p.profile_name] = MockScript.load(p.mock_script_path)
                else:
                    self._scripts[p.profile_name] = MockScript()

    def profile(self, name: str) -> ModelProfile:
        try:
            return self._profiles[name]
        except KeyError:
            raise ConfigError(f"no gateway profile named {name!r}") from None

    def has_profile(self, name: str) -> bool:
        return name in self._profiles

    def set_mock_script(self, profile_name: str, script: MockScript) -> None:
        """Install a script programmatically (tests and fixtures)."""
        if not self.profile(profile_name).is_mock:
            raise ConfigError(f"profile {profile_name} is not a mock profile")
        self._scripts[profile_name] = script

    def complete(self, request: ChatRequest) -> ChatResponse:
        profile = self.profile(request.profile_name)
        with self._semaphores[profile.profile_name]:
            start = time.monotonic()
            if profile.is_mock:
                content, usage = self._mock_complete(profile, request, start)
            else:
                content, usage = self._http_complete(profile, request)
            latency = time.monotonic() - start
        return ChatResponse(content=content, latency=latency, token_usage=usage)

    def _mock_complete(
        self, profile: ModelProfile, request: ChatRequest, start: float
    ) -> tuple[str, None]:
        script = self._scripts[profile.profile_name]
        content, delay = script.respond(request.rendered())
        if delay > profile.timeout:
            # Honour the timeout contract even offline so timeout handling is testable.
            time.sleep(profile.timeout)
            raise BackendTimeout(
                profile.profile_name, f"mock delay {delay}s exceeds timeout {profile.timeout}s"
            )
        if delay > 0:
            time.sleep(delay)
        return content, None

    def _http_complete(
        self, profile: ModelProfile, request: ChatRequest
    ) -> tuple[str, Optional[tuple[int, int]]]:
        body = {
            "model": profile.model_id,
            "messages": [{"role": r, "content": c} for r, c in request.messages],
            "temperature": profile.temperature,
            "max_tokens": profile.max_output_tokens,
        }
        url = profile.endpoint.rstrip("/") + "/chat/completions"
        try:
            resp = httpx.post(url, json=body, timeout=profile.timeout)
            resp.raise_for_status()
            data = resp.json()
        except httpx.TimeoutException as e:
            raise BackendTimeout(profile.profile_name, str(e)) from e
        except (httpx.HTTPError, json.JSONDecodeError) as e:
            raise BackendUnavailable(profile.profile_name, str(e)) from e
        try:
            content = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as e:
            raise BackendUnavailable(
                profile.profile_name, f"malformed completion payload: {e}"
            ) from e
        usage = None
        if isinstance(data.get("usage"), dict):
            u = data["usage"]
            if "prompt_tokens" in u and "completion_tokens" in u:
                usage = (u["prompt_tokens"], u["completion_tokens"])
        return content, usage

    def embed(self, texts: list[str], profile_name: str) -> list[list[float]]:
        if not texts:
            raise ValueError("embed requires at least one text")
        profile = self.profile(profile_name)
        if profile.is_mock:
            return [mock_embedding(t, profile.embedding_dim) for t in texts]
        url = profile.endpoint.rstrip("/") + "/embeddings"
        body = {"model": profile.model_id, "input": texts}
        try:
            resp = httpx.post(url, json=body, timeout=profile.timeout)
            resp.raise_for_status()
            data = resp.json()
            return [item["embedding"] for item in data["data"]]
        except httpx.TimeoutException as e:
            raise BackendTimeout(profile.profile_name, str(e)) from e
        except (httpx.HTTPError, json.JSONDecodeError, KeyError, TypeError) as e:
            raise BackendUnavailable(profile.profile_name, str(e)) from e
