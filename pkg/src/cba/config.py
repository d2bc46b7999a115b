"""Application configuration: one flat JSON document wiring every component.

Relative paths inside the file resolve against the file's own directory, so a
config can ship next to its fixtures. The ``CBA_CONFIG`` environment variable
names the default config; a ``--config`` flag overrides it.

Documented keys:
  profiles            list of model profiles: profile_name, endpoint ("mock" or URL),
                      model_id, temperature, max_output_tokens, timeout,
                      mock_script (path, mock only), embedding_dim
  router              criteria_text, examples [{query, label}], fallback, profile_name
  agent               profile_name, max_steps, stop_on_repeat, guiding_prompt (optional)
  generator_profile   profile used by the fast path and the bare mode
  judge               profile_name, threshold (judge pass score)
  retrieval           index_path and/or corpus_dir, mode (lexical|hybrid), target_tokens,
                      overlap_tokens, min_chunk_tokens, max_symbol_ratio, k,
                      embed_profile, skip_rag_below
  artifacts_path      JSON fixture of compliance artifacts
  specialist_domains  list of domain names; each needs a "specialist:<domain>" profile
  service             host, port, data_dir (session event logs)
  mode                auto | fasttrack_only | fullagentic_only | vanilla
  history_max_turns   conversation window rendered into prompts
  tooling             fanout, call_timeout, observation_cap
  eval                concurrency, word_boundary (keyword matching mode)
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .agent import AgentConfig, DEFAULT_GUIDING_PROMPT
from .core import DEFAULT_HISTORY_TURNS
from .errors import ConfigError
from .gateway import DEFAULT_EMBEDDING_DIM, ModelProfile
from .router import RouterConfig

MODES = ("auto", "fasttrack_only", "fullagentic_only", "vanilla")

ENV_CONFIG = "CBA_CONFIG"


@dataclass
class RetrievalParams:
    index_path: Optional[str] = None
    corpus_dir: Optional[str] = None
    mode: str = "lexical"
    target_tokens: int = 512
    overlap_tokens: int = 64
    min_chunk_tokens: int = 20
    max_symbol_ratio: float = 0.5
    k: int = 5
    embed_profile: Optional[str] = None
    skip_rag_below: float = 0.0


@dataclass
class ServiceParams:
    host: str = "127.0.0.1"
    port: int = 8080
    data_dir: Optional[str] = None


@dataclass
class ToolingParams:
    fanout: int = 4
    call_timeout: float = 10.0
    observation_cap: int = 4000


@dataclass
class EvalParams:
    concurrency: int = 4
    word_boundary: bool = False


@dataclass
class JudgeParams:
    profile_name: str = "judge"
    threshold: int = 4


@dataclass
class AppConfig:
    profiles: list[ModelProfile]
    router: RouterConfig
    agent: AgentConfig
    generator_profile: str = "generator"
    judge: JudgeParams = field(default_factory=JudgeParams)
    retrieval: RetrievalParams = field(default_factory=RetrievalParams)
    artifacts_path: Optional[str] = None
    specialist_domains: list[str] = field(default_factory=list)
    service: ServiceParams = field(default_factory=ServiceParams)
    mode: str = "auto"
    history_max_turns: int = DEFAULT_HISTORY_TURNS
    tooling: ToolingParams = field(default_factory=ToolingParams)
    eval: EvalParams = field(default_factory=EvalParams)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        names = {p.profile_name for p in self.profiles}
        if self.mode == "auto" and self.router.profile_name not in names:
            raise ConfigError("mode=auto requires the router profile to be configured")

    @classmethod
    def from_dict(cls, d: dict, base_dir: Optional[Path] = None) -> "AppConfig":
        base = base_dir or Path.cwd()

        def resolve(p: Optional[str]) -> Optional[str]:
            if p is None:
                return None
            path = Path(p)
            return str(path if path.is_absolute() else base / path)

        profiles = []
        for p in d.get("profiles", []):
            profiles.append(
                ModelProfile(
                    profile_name=p["profile_name"],
                    endpoint=p.get("endpoint", "mock"),
                    model_id=p.get("model_id", "mock"),
                    temperature=float(p.get("temperature", 0.0)),
                    max_output_tokens=int(p.get("max_output_tokens", 1024)),
                    timeout=float(p.get("timeout", 30.0)),
                    mock_script_path=resolve(p.get("mock_script")),
                    embedding_dim=int(p.get("embedding_dim", DEFAULT_EMBEDDING_DIM)),
                )
            )
        router = RouterConfig.from_dict(d.get("router", {}))
        agent_raw = d.get("agent", {})
        agent = AgentConfig(
            profile_name=agent_raw.get("profile_name", "agent"),
            guiding_prompt=agent_raw.get("guiding_prompt") or DEFAULT_GUIDING_PROMPT,
            max_steps=int(agent_raw.get("max_steps", 8)),
            stop_on_repeat=bool(agent_raw.get("stop_on_repeat", True)),
        )
        retrieval_raw = d.get("retrieval", {})
        retrieval = RetrievalParams(
            index_path=resolve(retrieval_raw.get("index_path")),
            corpus_dir=resolve(retrieval_raw.get("corpus_dir")),
            mode=retrieval_raw.get("mode", "lexical"),
            target_tokens=int(retrieval_raw.get("target_tokens", 512)),
            overlap_tokens=int(retrieval_raw.get("overlap_tokens", 64)),
            min_chunk_tokens=int(retrieval_raw.get("min_chunk_tokens", 20)),
            max_symbol_ratio=float(retrieval_raw.get("max_symbol_ratio", 0.5)),
            k=int(retrieval_raw.get("k", 5)),
            embed_profile=retrieval_raw.get("embed_profile"),
            skip_rag_below=float(retrieval_raw.get("skip_rag_below", 0.0)),
        )
        service_raw = d.get("service", {})
        service = ServiceParams(
            host=service_raw.get("host", "127.0.0.1"),
            port=int(service_raw.get("port", 8080)),
            data_dir=resolve(service_raw.get("data_dir")),
        )
        tooling_raw = d.get("tooling", {})
        tooling = ToolingParams(
            fanout=int(tooling_raw.get("fanout", 4)),
            call_timeout=float(tooling_raw.get("call_timeout", 10.0)),
            observation_cap=int(tooling_raw.get("observation_cap", 4000)),
        )
        eval_raw = d.get("eval", {})
        eval_params = EvalParams(
            concurrency=int(eval_raw.get("concurrency", 4)),
            word_boundary=bool(eval_raw.get("word_boundary", False)),
        )
        judge_raw = d.get("judge", {})
        judge = JudgeParams(
            profile_name=judge_raw.get("profile_name", "judge"),
            threshold=int(judge_raw.get("threshold", 4)),
        )
        return cls(
            profiles=profiles,
            router=router,
            agent=agent,
            generator_profile=d.get("generator_profile", "generator"),
            judge=judge,
            retrieval=retrieval,
            artifacts_path=resolve(d.get("artifacts_path")),
            specialist_domains=list(d.get("specialist_domains", [])),
            service=service,
            mode=d.get("mode", "auto"),
            history_max_turns=int(d.get("history_max_turns", DEFAULT_HISTORY_TURNS)),
            tooling=tooling,
            eval=eval_params,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "AppConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from e
        config = cls.from_dict(raw, base_dir=path.parent.resolve())
        config.validate_paths()
        return config

    def validate_paths(self) -> None:
        for label, p in (
            ("artifacts_path", self.artifacts_path),
            ("retrieval.corpus_dir", self.retrieval.corpus_dir),
        ):
            if p is not None and not Path(p).exists():
                raise ConfigError(f"{label} does not exist: {p}")
        if (
            self.retrieval.index_path is None
            and self.retrieval.corpus_dir is None
        ):
            raise ConfigError("retrieval needs index_path or corpus_dir")
        for p in self.profiles:
            if p.mock_script_path and not Path(p.mock_script_path).exists():
                raise ConfigError(
                    f"profile {p.profile_name}: mock_script missing: {p.mock_script_path}"
                )


def locate_config(cli_value: Optional[str] = None) -> str:
    """Resolution order: --config flag, then the CBA_CONFIG environment variable."""
    if cli_value:
        return cli_value
    env = os.environ.get(ENV_CONFIG)
    if env:
        return env
    raise ConfigError(f"no config given; pass --config or set {ENV_CONFIG}")
