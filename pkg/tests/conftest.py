import json
from pathlib import Path

import pytest

from cba.artifacts import ArtifactStore
from cba.cli import data_path
from cba.config import AppConfig
from cba.gateway import Gateway, MockScript, ModelProfile
from cba.orchestrator import Orchestrator
from cba.retrieval import Chunk


@pytest.fixture(scope="session")
def demo_config_path() -> Path:
    return data_path("demo", "config.json")


@pytest.fixture(scope="session")
def demo_config(demo_config_path) -> AppConfig:
    return AppConfig.from_file(demo_config_path)


@pytest.fixture(scope="session")
def demo_orchestrator(demo_config) -> Orchestrator:
    # Session-scoped: the orchestrator is immutable apart from its session store.
    return Orchestrator(demo_config)


@pytest.fixture(scope="session")
def demo_store() -> ArtifactStore:
    return ArtifactStore.load(data_path("demo", "artifacts.json"))


def make_mock_gateway(scripts: dict[str, dict], **profile_kwargs) -> Gateway:
    """Gateway with one mock profile per entry; values are MockScript dicts."""
    profiles = [
        ModelProfile(profile_name=name, endpoint="mock", model_id=f"mock-{name}", **profile_kwargs)
        for name in scripts
    ]
    gateway = Gateway(profiles)
    for name, script in scripts.items():
        gateway.set_mock_script(name, MockScript.from_dict(script))
    return gateway


@pytest.fixture
def mock_gateway_factory():
    return make_mock_gateway


def make_chunk(text: str, chunk_id: str = "doc.md#0", position: int = 0) -> Chunk:
    return Chunk(
        chunk_id=chunk_id,
        doc_id=chunk_id.split("#")[0],
        text=text,
        token_count=len(text.split()),
        position=position,
    )


@pytest.fixture
def chunk_factory():
    return make_chunk


def write_config(tmp_path: Path, overrides: dict) -> Path:
    """Write a config file under tmp_path; caller supplies a full config dict."""
    path = tmp_path / "config.json"
    path.write_text(json.dumps(overrides), encoding="utf-8")
    return path


class Golden:
    """Compare rendered text against a frozen file; UPDATE_GOLDEN=1 rewrites."""

    def __init__(self, directory: Path):
        self.directory = directory

    def check(self, name: str, actual: str) -> None:
        import os

        path = self.directory / name
        if os.environ.get("UPDATE_GOLDEN") == "1":
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(actual, encoding="utf-8")
        expected = path.read_text(encoding="utf-8")
        assert actual == expected, f"golden mismatch for {name} (set UPDATE_GOLDEN=1 to refresh)"


@pytest.fixture
def golden() -> Golden:
    return Golden(Path(__file__).parent / "golden")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion whenever the suite ran."""
    lines = []
    for outcome in ("passed", "failed"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" not in report.nodeid or report.when != "call":
                continue
            name = report.nodeid.split("::")[-1]
            lines.append((name, outcome.upper()))
    if not lines:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in sorted(lines):
        terminalreporter.write_line(f"{outcome:4}  {name}")
