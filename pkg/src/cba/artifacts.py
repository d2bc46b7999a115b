"""Read-only store of enterprise compliance artifacts (reviews, policies, datasets, systems).

Loaded once from a JSON fixture and immutable afterwards, so every operation
is safe under unrestricted concurrent reads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ArtifactLoadError, ArtifactNotFound
from .retrieval import Bm25Index

ARTIFACT_KINDS = ("review", "policy", "dataset", "system")
ARTIFACT_STATUSES = ("draft", "active", "archived")
_ID_RE = re.compile(r"^ART-\d+$")


@dataclass
class Artifact:
    artifact_id: str
    kind: str
    name: str
    owner: str
    status: str
    description: str
    links: list[str] = field(default_factory=list)
    attributes: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not _ID_RE.match(self.artifact_id):
            raise ArtifactLoadError(f"bad artifact_id {self.artifact_id!r} (want ART-<digits>)")
        if self.kind not in ARTIFACT_KINDS:
            raise ArtifactLoadError(f"{self.artifact_id}: unknown kind {self.kind!r}")
        if self.status not in ARTIFACT_STATUSES:
            raise ArtifactLoadError(f"{self.artifact_id}: unknown status {self.status!r}")
        if not self.name:
            raise ArtifactLoadError(f"{self.artifact_id}: name must be non-empty")

    def virtual_text(self) -> str:
        """The searchable text view: name, description, owner, attribute values."""
        parts = [self.name, self.description, self.owner]
        parts.extend(self.attributes.values())
        return " ".join(parts)

    def to_dict(self) -> dict:
        return {
            "artifact_id": self.artifact_id,
            "kind": self.kind,
            "name": self.name,
            "owner": self.owner,
            "status": self.status,
            "description": self.description,
            "links": list(self.links),
            "attributes": dict(self.attributes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Artifact":
        return cls(
            artifact_id=d["artifact_id"],
            kind=d["kind"],
            name=d["name"],
            owner=d["owner"],
            status=d["status"],
            description=d["description"],
            links=list(d.get("links", [])),
            attributes=dict(d.get("attributes", {})),
        )


class ArtifactStore:
    def __init__(self, artifacts: list[Artifact]):
        self._by_id: dict[str, Artifact] = {}
        for a in artifacts:
            if a.artifact_id in self._by_id:
                raise ArtifactLoadError(f"duplicate artifact_id {a.artifact_id}")
            self._by_id[a.artifact_id] = a
        for a in artifacts:
            for link in a.links:
                if link not in self._by_id:
                    raise ArtifactLoadError(
                        f"{a.artifact_id} links to missing artifact {link!r}"
                    )
        self._bm25 = Bm25Index()
        for a in artifacts:
            self._bm25.add(a.artifact_id, a.virtual_text())

    def __len__(self) -> int:
        return len(self._by_id)

    def ids(self) -> list[str]:
        return list(self._by_id)

    @classmethod
    def load(cls, path: str | Path) -> "ArtifactStore":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ArtifactLoadError(f"cannot read artifact fixture {path}: {e}") from e
        if not isinstance(raw, list):
            raise ArtifactLoadError(f"artifact fixture {path} must be a JSON array")
        return cls([Artifact.from_dict(item) for item in raw])


def get_artifact(store: ArtifactStore, artifact_id: str) -> Artifact:
    try:
        return store._by_id[artifact_id]
    except KeyError:
        raise ArtifactNotFound(
            f"no artifact with id {artifact_id!r}; "
            "try search_artifacts to locate entities by name or description"
        ) from None


def search_artifacts(
    store: ArtifactStore, query: str, k: int = 5
) -> list[tuple[Artifact, float]]:
    """BM25 over each artifact's virtual text; same tie-break rules as chunk search."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return [
        (store._by_id[aid], score) for aid, score in store._bm25.top(query, k)
    ]


def related_artifacts(store: ArtifactStore, artifact_id: str, k: int = 5) -> list[Artifact]:
    """Link-graph neighbours first (in link order), then nearest by text similarity."""
    if k < 1:
        raise ValueError("k must be >= 1")
    anchor = get_artifact(store, artifact_id)
    seen: dict[str, Artifact] = {}
    for link in anchor.links:
        if link not in seen:
            seen[link] = store._by_id[link]
    for aid, _score in store._bm25.top(anchor.virtual_text(), len(store)):
        if aid == artifact_id or aid in seen:
            continue
        seen[aid] = store._by_id[aid]
    return list(seen.values())[:k]
