"""End-to-end evaluation: keyword-match metrics, judge pass rate, latency, condition runs.

Match rates are computed with exact rational arithmetic and converted to float
once at the end, so the corpus-level and per-question-averaged rates coincide
bit-for-bit whenever every case has the same keyword count.

Keyword membership is case-insensitive substring containment after whitespace
normalization (the weakest reasonable reading of "the answer contains the
keyword"); set ``word_boundary=True`` to require whole-word matches instead.
"""

from __future__ import annotations

import json
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .core import Session
from .errors import BackendError, CbaError, ConfigError, EmptyDataset, NoJudgeableCases
from .gateway import ChatRequest, Gateway
from .orchestrator import Orchestrator

DEFAULT_JUDGE_THRESHOLD = 4

# Condition name -> (display label, orchestrator mode)
CONDITIONS: dict[str, tuple[str, str]] = {
    "vanilla": ("Vanilla LLM", "vanilla"),
    "fasttrack": ("FastTrack", "fasttrack_only"),
    "fullagentic": ("FullAgentic", "fullagentic_only"),
    "router": ("Router", "auto"),
}

JUDGE_PROMPT = """\
You grade an answer to a compliance question against a reference answer.

Question: {question}

Reference answer: {reference}

Candidate answer: {candidate}

Score the candidate from 1 (wrong or unrelated) to 5 (fully correct and \
complete). Consider factual agreement with the reference only; style does \
not matter. Reply with a single integer from 1 to 5."""

_INT_RE = re.compile(r"-?\d+")
_WS_RE = re.compile(r"\s+")


@dataclass
class BenchmarkCase:
    case_id: str
    question: str
    keywords: list[str]
    reference_answer: Optional[str] = None

    def __post_init__(self):
        self.keywords = [k.strip() for k in self.keywords if k.strip()]
        if not self.keywords:
            raise ConfigError(f"case {self.case_id}: needs at least one keyword")

    @property
    def judgeable(self) -> bool:
        return self.reference_answer is not None


@dataclass
class CaseResult:
    case_id: str
    answer: str
    keywords: list[str]
    matched_keywords: list[str]
    latency: float
    judge_score: Optional[int] = None
    judge_pass: Optional[bool] = None
    judge_flagged: bool = False  # judge replied, but with no parseable score
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "answer": self.answer,
            "keywords": self.keywords,
            "matched_keywords": self.matched_keywords,
            "latency": self.latency,
            "judge_score": self.judge_score,
            "judge_pass": self.judge_pass,
            "judge_flagged": self.judge_flagged,
            "error": self.error,
        }


@dataclass
class EvalReport:
    dataset: str
    condition: str
    n: int
    global_match_rate: float
    average_match_rate: float
    avg_latency: float
    pass_rate: Optional[float] = None
    case_errors: int = 0
    judge_errors: int = 0
    results: list[CaseResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "dataset": self.dataset,
            "condition": self.condition,
            "n": self.n,
            "avg_latency": self.avg_latency,
            "global_match_rate": self.global_match_rate,
            "average_match_rate": self.average_match_rate,
            "case_errors": self.case_errors,
            "judge_errors": self.judge_errors,
            "results": [r.to_dict() for r in self.results],
        }
        if self.pass_rate is not None:
            d["pass_rate"] = self.pass_rate
        return d


def normalize_text(text: str) -> str:
    return _WS_RE.sub(" ", text).strip().casefold()


def match_keywords(
    answer: str, keywords: list[str], word_boundary: bool = False
) -> list[str]:
    """The keywords contained in the answer, preserving keyword order."""
    haystack = normalize_text(answer)
    matched = []
    for keyword in keywords:
        needle = normalize_text(keyword)
        if not needle:
            continue
        if word_boundary:
            if re.search(rf"(?<![0-9a-z]){re.escape(needle)}(?![0-9a-z])", haystack):
                matched.append(keyword)
        elif needle in haystack:
            matched.append(keyword)
    return matched


def global_match_rate(results: list[CaseResult]) -> float:
    """Matched keywords over all keywords, pooled across the whole dataset."""
    if not results:
        raise EmptyDataset("no case results")
    total = sum(len(r.keywords) for r in results)
    if total == 0:
        raise EmptyDataset("no keywords across the dataset")
    matched = sum(len(r.matched_keywords) for r in results)
    return float(Fraction(matched, total))


def average_match_rate(results: list[CaseResult]) -> float:
    """Mean of per-case keyword match rates."""
    if not results:
        raise EmptyDataset("no case results")
    acc = Fraction(0)
    for r in results:
        if not r.keywords:
            raise EmptyDataset(f"case {r.case_id} has no keywords")
        acc += Fraction(len(r.matched_keywords), len(r.keywords))
    return float(acc / len(results))


def pass_rate(results: list[CaseResult]) -> float:
    """Fraction of judged cases that met the threshold."""
    judged = [r for r in results if r.judge_pass is not None]
    if not judged:
        raise NoJudgeableCases("no judged cases in this result set")
    return float(Fraction(sum(1 for r in judged if r.judge_pass), len(judged)))


def avg_latency(results: list[CaseResult]) -> float:
    if not results:
        raise EmptyDataset("no case results")
    return sum(r.latency for r in results) / len(results)


def judge_case(
    gateway: Gateway,
    profile_name: str,
    case: BenchmarkCase,
    answer: str,
    threshold: int = DEFAULT_JUDGE_THRESHOLD,
) -> tuple[int, bool, bool]:
    """Grade an answer 1-5 against the reference; returns (score, pass, flagged).

    An unparseable judge reply scores 0 and fails, flagged so reports can
    surface it. Backend errors propagate to the caller.
    """
    if not case.judgeable:
        raise ValueError(f"case {case.case_id} has no reference answer")
    prompt = JUDGE_PROMPT.format(
        question=case.question, reference=case.reference_answer, candidate=answer
    )
    response = gateway.complete(
        ChatRequest(messages=[("user", prompt)], profile_name=profile_name)
    )
    m = _INT_RE.search(response.content)
    if m is None:
        return 0, False, True
    score = int(m.group())
    return score, score >= threshold, False


def load_benchmark(path: str | Path) -> list[BenchmarkCase]:
    """JSONL, one case per line: case_id, question, keywords, reference_answer?."""
    cases = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        cases.append(
            BenchmarkCase(
                case_id=obj["case_id"],
                question=obj["question"],
                keywords=list(obj["keywords"]),
                reference_answer=obj.get("reference_answer"),
            )
        )
    if not cases:
        raise ConfigError(f"benchmark {path} has no cases")
    ids = [c.case_id for c in cases]
    if len(ids) != len(set(ids)):
        raise ConfigError(f"benchmark {path} has duplicate case ids")
    return cases


def run_condition(
    orchestrator: Orchestrator,
    dataset_name: str,
    cases: list[BenchmarkCase],
    condition: str,
    concurrency: int = 4,
) -> EvalReport:
    """Run every case through the orchestrator under one condition.

    Each case gets a fresh session (no cross-case contamination). Case
    failures become empty answers; judge backend errors are tallied apart and
    leave the pass-rate denominator.
    """
    if condition not in CONDITIONS:
        raise ConfigError(
            f"unknown condition {condition!r}; valid: {', '.join(CONDITIONS)}"
        )
    label, mode = CONDITIONS[condition]
    word_boundary = orchestrator.config.eval.word_boundary
    judge_profile = orchestrator.config.judge.profile_name
    threshold = orchestrator.config.judge.threshold
    judgeable_any = any(c.judgeable for c in cases)

    def run_case(case: BenchmarkCase) -> CaseResult:
        session = Session(session_id=f"eval-{condition}-{case.case_id}")
        start = time.monotonic()
        answer = ""
        error: Optional[str] = None
        try:
            result = orchestrator.handle_query(session, case.question, mode=mode)
            if result.error:
                error = result.error
                answer = ""
            else:
                answer = result.answer
        except CbaError as e:
            error = type(e).__name__
        latency = time.monotonic() - start
        matched = match_keywords(answer, case.keywords, word_boundary)
        result = CaseResult(
            case_id=case.case_id,
            answer=answer,
            keywords=list(case.keywords),
            matched_keywords=matched,
            latency=latency,
            error=error,
        )
        if case.judgeable:
            try:
                score, passed, flagged = judge_case(
                    orchestrator.gateway, judge_profile, case, answer, threshold
                )
                result.judge_score = score
                result.judge_pass = passed
                result.judge_flagged = flagged
            except BackendError as e:
                result.error = result.error or f"judge: {e}"
        return result

    # pool.map preserves input order, so results align with cases.
    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        results = list(pool.map(run_case, cases))

    judge_errors = sum(
        1 for c, r in zip(cases, results) if c.judgeable and r.judge_pass is None
    )
    report = EvalReport(
        dataset=dataset_name,
        condition=label,
        n=len(cases),
        global_match_rate=global_match_rate(results),
        average_match_rate=average_match_rate(results),
        avg_latency=avg_latency(results),
        pass_rate=None,
        case_errors=sum(1 for r in results if r.error),
        judge_errors=judge_errors,
        results=results,
    )
    if judgeable_any:
        try:
            report.pass_rate = pass_rate(results)
        except NoJudgeableCases:
            report.pass_rate = None
    return report


def run_eval(
    orchestrator: Orchestrator,
    dataset_name: str,
    cases: list[BenchmarkCase],
    conditions: list[str],
) -> list[EvalReport]:
    concurrency = orchestrator.config.eval.concurrency
    return [
        run_condition(orchestrator, dataset_name, cases, condition, concurrency)
        for condition in conditions
    ]


def render_report_table(reports: list[EvalReport], dataset_name: str) -> str:
    """Aligned text table, one row per condition; Pass Rate column only when present."""
    with_pass = any(r.pass_rate is not None for r in reports)
    headers = ["Model", "Avg. Latency (s)", "Global Match Rate (%)", "Average Match Rate (%)"]
    if with_pass:
        headers.append("Pass Rate (%)")
    rows = [headers]
    for r in reports:
        row = [
            r.condition,
            f"{r.avg_latency:.2f}",
            f"{r.global_match_rate * 100:.1f}",
            f"{r.average_match_rate * 100:.1f}",
        ]
        if with_pass:
            row.append(f"{r.pass_rate * 100:.1f}" if r.pass_rate is not None else "n/a")
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(headers))]
    lines = [f"Dataset: {dataset_name} (N={reports[0].n if reports else 0})"]
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)))
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
