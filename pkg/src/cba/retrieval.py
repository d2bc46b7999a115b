"""Corpus ingestion, chunking, quality filtering, indexing, and top-k search.

Token counts are whitespace tokens throughout (an approximation of model
tokenization, chosen to avoid a tokenizer dependency). The chunker splits at
structural boundaries (blank lines and headings) and packs greedily; a
boundary-free run longer than the target is hard-split. Chunk text is the
space-joined token sequence, so "reconstructing the body" means reproducing
the document's whitespace-token stream.

Scoring is BM25 (k1=1.2, b=0.75) over an inverted index; hybrid mode fuses
min-max-normalized BM25 with cosine similarity of gateway embeddings over the
top-50 lexical candidates.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigError, EmptyIndex
from .gateway import Gateway

BM25_K1 = 1.2
BM25_B = 0.75
DEFAULT_TARGET_TOKENS = 512
DEFAULT_OVERLAP_TOKENS = 64
DEFAULT_MIN_CHUNK_TOKENS = 20
DEFAULT_MAX_SYMBOL_RATIO = 0.5
HYBRID_CANDIDATE_POOL = 50
INDEX_FORMAT_VERSION = 1

_TERM_RE = re.compile(r"[a-z0-9]+")
_HEADING_RE = re.compile(r"^#{1,6}\s")


def tokenize_terms(text: str) -> list[str]:
    """Lowercase and split on non-alphanumerics; the indexing/query tokenizer."""
    return _TERM_RE.findall(text.lower())


@dataclass
class Document:
    doc_id: str
    title: str
    body: str
    source: str = "wiki"  # wiki | post | proprietary
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.body.strip():
            raise ValueError(f"document {self.doc_id} has an empty body")
        if self.source not in ("wiki", "post", "proprietary"):
            raise ValueError(f"document {self.doc_id}: unknown source {self.source!r}")


@dataclass
class Chunk:
    chunk_id: str  # "<doc_id>#<position>"
    doc_id: str
    text: str
    token_count: int
    position: int

    def to_dict(self) -> dict:
        return {
            "chunk_id": self.chunk_id,
            "doc_id": self.doc_id,
            "text": self.text,
            "token_count": self.token_count,
            "position": self.position,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Chunk":
        return cls(**d)


@dataclass
class RetrievalHit:
    chunk: Chunk
    score: float
    rank: int


def _structural_blocks(body: str) -> list[list[str]]:
    """Split a body into token blocks at blank lines and heading lines."""
    blocks: list[list[str]] = []
    current: list[str] = []
    for line in body.splitlines():
        if not line.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        if _HEADING_RE.match(line):
            if current:
                blocks.append(current)
                current = []
        current.extend(line.split())
    if current:
        blocks.append(current)
    return blocks


def chunk_document(
    doc: Document,
    target_tokens: int = DEFAULT_TARGET_TOKENS,
    overlap_tokens: int = DEFAULT_OVERLAP_TOKENS,
) -> list[Chunk]:
    """Greedy boundary-respecting chunker with trailing-token overlap.

    Consecutive chunks share the last ``overlap_tokens`` tokens of the
    predecessor (fewer if the predecessor is shorter). Every chunk is at most
    ``target_tokens`` tokens.
    """
    if not target_tokens > overlap_tokens >= 0:
        raise ValueError("need target_tokens > overlap_tokens >= 0")

    blocks = _structural_blocks(doc.body)
    chunks_tokens: list[list[str]] = []
    prefix: list[str] = []  # overlap carried from the previous chunk
    new: list[str] = []  # tokens beyond the carried prefix

    def flush():
        nonlocal prefix, new
        chunk = prefix + new
        chunks_tokens.append(chunk)
        prefix = chunk[-overlap_tokens:] if overlap_tokens else []
        new = []

    for block in blocks:
        remaining = block
        while remaining:
            capacity = target_tokens - len(prefix) - len(new)
            if len(remaining) <= capacity:
                new.extend(remaining)
                remaining = []
            elif new:
                flush()
            else:
                # Boundary-free run longer than what fits: hard-split.
                new.extend(remaining[:capacity])
                remaining = remaining[capacity:]
                flush()
    if new:
        flush()

    result = []
    for pos, tokens in enumerate(chunks_tokens):
        result.append(
            Chunk(
                chunk_id=f"{doc.doc_id}#{pos}",
                doc_id=doc.doc_id,
                text=" ".join(tokens),
                token_count=len(tokens),
                position=pos,
            )
        )
    return result


def reconstruct_tokens(chunks: list[Chunk], overlap_tokens: int) -> list[str]:
    """Invert chunk_document: drop each chunk's carried overlap and concatenate."""
    out: list[str] = []
    prev_len = 0
    for i, chunk in enumerate(sorted(chunks, key=lambda c: c.position)):
        tokens = chunk.text.split()
        skip = min(overlap_tokens, prev_len) if i > 0 else 0
        out.extend(tokens[skip:])
        prev_len = chunk.token_count
    return out


def quality_filter(
    chunks: list[Chunk],
    min_tokens: int = DEFAULT_MIN_CHUNK_TOKENS,
    max_symbol_ratio: float = DEFAULT_MAX_SYMBOL_RATIO,
) -> list[Chunk]:
    """Drop short chunks and chunks that are mostly non-alphanumeric characters."""
    kept = []
    for chunk in chunks:
        if chunk.token_count < min_tokens:
            continue
        if not chunk.text:
            continue
        symbols = sum(1 for ch in chunk.text if not ch.isalnum())
        if symbols / len(chunk.text) > max_symbol_ratio:
            continue
        kept.append(chunk)
    return kept


class Bm25Index:
    """Inverted index with BM25 scoring over arbitrary (doc_id, text) pairs.

    idf = ln(1 + (N - df + 0.5) / (df + 0.5)), which keeps every score >= 0.
    Query terms are deduplicated before scoring.
    """

    def __init__(self, k1: float = BM25_K1, b: float = BM25_B):
        self.k1 = k1
        self.b = b
        self.doc_ids: list[str] = []
        self.doc_lengths: list[int] = []
        self.postings: dict[str, list[tuple[int, int]]] = {}  # term -> [(doc index, tf)]

    def add(self, doc_id: str, text: str) -> None:
        idx = len(self.doc_ids)
        terms = tokenize_terms(text)
        self.doc_ids.append(doc_id)
        self.doc_lengths.append(len(terms))
        for term, tf in sorted(Counter(terms).items()):
            self.postings.setdefault(term, []).append((idx, tf))

    def __len__(self) -> int:
        return len(self.doc_ids)

    def _idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        n = len(self.doc_ids)
        return math.log(1.0 + (n - df + 0.5) / (df + 0.5))

    def scores(self, query: str) -> dict[str, float]:
        """BM25 score per doc_id for docs sharing at least one query term."""
        if not self.doc_ids:
            return {}
        avgdl = sum(self.doc_lengths) / len(self.doc_lengths)
        acc: dict[int, float] = {}
        for term in sorted(set(tokenize_terms(query))):
            postings = self.postings.get(term)
            if not postings:
                continue
            idf = self._idf(term)
            for idx, tf in postings:
                dl = self.doc_lengths[idx]
                denom = tf + self.k1 * (1 - self.b + self.b * dl / avgdl)
                acc[idx] = acc.get(idx, 0.0) + idf * tf * (self.k1 + 1) / denom
        return {self.doc_ids[idx]: score for idx, score in acc.items()}

    def top(self, query: str, k: int) -> list[tuple[str, float]]:
        """Top-k (doc_id, score), non-increasing score, ties by ascending doc_id."""
        scored = self.scores(query)
        ranked = sorted(scored.items(), key=lambda item: (-item[1], item[0]))
        return ranked[:k]

    def to_dict(self) -> dict:
        return {
            "k1": self.k1,
            "b": self.b,
            "doc_ids": self.doc_ids,
            "doc_lengths": self.doc_lengths,
            "postings": {t: [[i, tf] for i, tf in p] for t, p in self.postings.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Bm25Index":
        index = cls(k1=d["k1"], b=d["b"])
        index.doc_ids = list(d["doc_ids"])
        index.doc_lengths = list(d["doc_lengths"])
        index.postings = {
            t: [(i, tf) for i, tf in p] for t, p in d["postings"].items()
        }
        return index


class Index:
    """Immutable searchable chunk index; build once, share across threads."""

    def __init__(
        self,
        chunks: list[Chunk],
        mode: str = "lexical",
        vectors: Optional[dict[str, list[float]]] = None,
        embed_profile: Optional[str] = None,
    ):
        self.mode = mode
        self.chunks: dict[str, Chunk] = {c.chunk_id: c for c in chunks}
        self.bm25 = Bm25Index()
        for chunk in chunks:
            self.bm25.add(chunk.chunk_id, chunk.text)
        self.vectors = vectors or {}
        self.embed_profile = embed_profile

    def __len__(self) -> int:
        return len(self.chunks)

    def to_dict(self) -> dict:
        return {
            "format_version": INDEX_FORMAT_VERSION,
            "mode": self.mode,
            "embed_profile": self.embed_profile,
            "chunks": [c.to_dict() for c in self.chunks.values()],
            "vectors": self.vectors,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Index":
        if d.get("format_version") != INDEX_FORMAT_VERSION:
            raise ConfigError(
                f"unsupported index format_version {d.get('format_version')!r}"
            )
        chunks = [Chunk.from_dict(c) for c in d["chunks"]]
        return cls(
            chunks,
            mode=d["mode"],
            vectors=d.get("vectors") or {},
            embed_profile=d.get("embed_profile"),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Index":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_index(
    chunks: list[Chunk],
    mode: str = "lexical",
    gateway: Optional[Gateway] = None,
    embed_profile: Optional[str] = None,
) -> Index:
    if not chunks:
        raise ValueError("cannot build an index from zero chunks")
    if mode not in ("lexical", "hybrid"):
        raise ConfigError(f"unknown index mode {mode!r}")
    vectors = None
    if mode == "hybrid":
        if gateway is None or embed_profile is None:
            raise ConfigError("hybrid index needs a gateway and an embedding profile")
        embedded = gateway.embed([c.text for c in chunks], embed_profile)
        vectors = {c.chunk_id: v for c, v in zip(chunks, embedded)}
    return Index(chunks, mode=mode, vectors=vectors, embed_profile=embed_profile)


def _cosine(a: list[float], b: list[float]) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def search(
    index: Index,
    query: str,
    k: int = 5,
    gateway: Optional[Gateway] = None,
) -> list[RetrievalHit]:
    """Top-k chunks for a query; deterministic, ties broken by ascending chunk_id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(index) == 0:
        raise EmptyIndex("index holds no chunks")

    if index.mode == "lexical":
        ranked = index.bm25.top(query, k)
    else:
        candidates = index.bm25.top(query, HYBRID_CANDIDATE_POOL)
        if not candidates:
            ranked = []
        else:
            if gateway is None or index.embed_profile is None:
                raise ConfigError("hybrid search needs a gateway for query embedding")
            qvec = gateway.embed([query], index.embed_profile)[0]
            lex = {cid: s for cid, s in candidates}
            lo, hi = min(lex.values()), max(lex.values())
            fused = []
            for cid in lex:
                norm = (lex[cid] - lo) / (hi - lo) if hi > lo else 1.0
                cos = _cosine(qvec, index.vectors[cid])
                fused.append((cid, 0.5 * norm + 0.5 * cos))
            fused.sort(key=lambda item: (-item[1], item[0]))
            ranked = fused[:k]

    return [
        RetrievalHit(chunk=index.chunks[cid], score=score, rank=i + 1)
        for i, (cid, score) in enumerate(ranked)
    ]


_FRONT_MATTER_KV = re.compile(r"^([A-Za-z0-9_-]+)\s*:\s*(.*)$")


def parse_corpus_file(rel_path: str, text: str) -> Document:
    """Parse one corpus file: optional ``---``-delimited leading metadata block."""
    title = rel_path
    source = "wiki"
    metadata: dict[str, str] = {}
    body = text
    lines = text.splitlines()
    if lines and lines[0].strip() == "---":
        for end, line in enumerate(lines[1:], start=1):
            if line.strip() == "---":
                for raw in lines[1:end]:
                    m = _FRONT_MATTER_KV.match(raw.strip())
                    if not m:
                        continue
                    key, value = m.group(1).lower(), m.group(2).strip()
                    if key == "title":
                        title = value
                    elif key == "source":
                        source = value
                    else:
                        metadata[key] = value
                body = "\n".join(lines[end + 1:])
                break
    return Document(doc_id=rel_path, title=title, body=body, source=source, metadata=metadata)


def load_corpus(corpus_dir: str | Path) -> list[Document]:
    """Read every .md/.txt file under a directory; doc_id is the relative path."""
    root = Path(corpus_dir)
    if not root.is_dir():
        raise ConfigError(f"corpus directory not found: {root}")
    docs = []
    for path in sorted(root.rglob("*")):
        if path.suffix.lower() not in (".md", ".txt") or not path.is_file():
            continue
        rel = path.relative_to(root).as_posix()
        docs.append(parse_corpus_file(rel, path.read_text(encoding="utf-8")))
    return docs


@dataclass
class IngestStats:
    documents: int
    chunks_total: int
    chunks_kept: int


def ingest(
    corpus_dir: str | Path,
    target_tokens: int = DEFAULT_TARGET_TOKENS,
    overlap_tokens: int = DEFAULT_OVERLAP_TOKENS,
    min_tokens: int = DEFAULT_MIN_CHUNK_TOKENS,
    max_symbol_ratio: float = DEFAULT_MAX_SYMBOL_RATIO,
    mode: str = "lexical",
    gateway: Optional[Gateway] = None,
    embed_profile: Optional[str] = None,
) -> tuple[Index, IngestStats]:
    """Full pipeline: load, chunk, filter, index."""
    docs = load_corpus(corpus_dir)
    all_chunks: list[Chunk] = []
    for doc in docs:
        all_chunks.extend(chunk_document(doc, target_tokens, overlap_tokens))
    kept = quality_filter(all_chunks, min_tokens, max_symbol_ratio)
    if not kept:
        raise ConfigError(f"corpus {corpus_dir} produced no chunks after filtering")
    index = build_index(kept, mode=mode, gateway=gateway, embed_profile=embed_profile)
    stats = IngestStats(
        documents=len(docs), chunks_total=len(all_chunks), chunks_kept=len(kept)
    )
    return index, stats
