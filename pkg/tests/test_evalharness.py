import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cba.cli import data_path
from cba.errors import EmptyDataset, NoJudgeableCases
from cba.evalharness import (
    BenchmarkCase,
    CaseResult,
    average_match_rate,
    avg_latency,
    global_match_rate,
    judge_case,
    load_benchmark,
    match_keywords,
    pass_rate,
    render_report_table,
    run_eval,
)

from .conftest import make_mock_gateway


def result(keywords: list[str], matched: list[str], latency: float = 0.0, **kw) -> CaseResult:
    return CaseResult(
        case_id=kw.get("case_id", "c"),
        answer=kw.get("answer", ""),
        keywords=keywords,
        matched_keywords=matched,
        latency=latency,
        judge_score=kw.get("judge_score"),
        judge_pass=kw.get("judge_pass"),
    )


class TestMatchKeywords:
    def test_both_keywords_match(self):
        assert match_keywords("Data Retention is 90 days", ["retention", "90 days"]) == [
            "retention", "90 days",
        ]

    def test_empty_answer_matches_nothing(self):
        assert match_keywords("", ["a", "b"]) == []

    def test_substring_semantics(self):
        # Documented behaviour: plural forms match by containment.
        assert match_keywords("retentions", ["retention"]) == ["retention"]

    def test_whitespace_normalized(self):
        assert match_keywords("keep for 90\n  days", ["90 days"]) == ["90 days"]

    def test_case_folded(self):
        assert match_keywords("STANDARD Contractual CLAUSES", ["standard contractual clauses"])

    def test_word_boundary_mode_rejects_substring(self):
        assert match_keywords("retentions", ["retention"], word_boundary=True) == []
        assert match_keywords("the retention clock", ["retention"], word_boundary=True)


# Independent oracle: the naive double loop over keywords, plain float math.
def oracle_global(cases: list[tuple[list[str], str]]) -> float:
    matched = 0
    total = 0
    for keywords, answer in cases:
        total += len(keywords)
        for kw in keywords:
            if kw.lower() in answer.lower():
                matched += 1
    return matched / total


def oracle_average(cases: list[tuple[list[str], str]]) -> float:
    acc = 0.0
    for keywords, answer in cases:
        hits = 0
        for kw in keywords:
            if kw.lower() in answer.lower():
                hits += 1
        acc += hits / len(keywords)
    return acc / len(cases)


def results_from(cases: list[tuple[list[str], str]]) -> list[CaseResult]:
    return [
        result(keywords, match_keywords(answer, keywords), answer=answer)
        for keywords, answer in cases
    ]


class TestMatchRates:
    def test_worked_example(self):
        # K sizes 2 and 3; matches 1 and 2: global 3/5, average (1/2 + 2/3)/2.
        results = [
            result(["a", "b"], ["a"]),
            result(["c", "d", "e"], ["c", "d"]),
        ]
        assert global_match_rate(results) == pytest.approx(0.600, abs=1e-12)
        assert average_match_rate(results) == pytest.approx(7 / 12, abs=1e-12)

    def test_metrics_differ_on_unequal_keyword_counts(self):
        results = [result(["a", "b"], ["a"]), result(["c", "d", "e"], ["c", "d"])]
        assert global_match_rate(results) != average_match_rate(results)

    def test_all_matched_is_one(self):
        results = [result(["a"], ["a"]), result(["b", "c"], ["b", "c"])]
        assert global_match_rate(results) == 1.0
        assert average_match_rate(results) == 1.0

    def test_none_matched_is_zero(self):
        results = [result(["a"], []), result(["b"], [])]
        assert global_match_rate(results) == 0.0
        assert average_match_rate(results) == 0.0

    def test_empty_results_raise(self):
        with pytest.raises(EmptyDataset):
            global_match_rate([])
        with pytest.raises(EmptyDataset):
            average_match_rate([])

    def test_against_randomized_oracle(self):
        rng = random.Random(7)
        vocabulary = [f"kw{i}" for i in range(30)]
        for _ in range(300):
            cases = []
            for _ in range(rng.randint(1, 10)):
                keywords = rng.sample(vocabulary, rng.randint(1, 6))
                answer = " ".join(rng.sample(vocabulary, rng.randint(0, 20)))
                cases.append((keywords, answer))
            results = results_from(cases)
            assert global_match_rate(results) == pytest.approx(oracle_global(cases), abs=1e-12)
            assert average_match_rate(results) == pytest.approx(oracle_average(cases), abs=1e-12)

    @given(
        st.lists(
            st.tuples(
                st.integers(min_value=1, max_value=6),  # |K_i|
                st.integers(min_value=0, max_value=6),  # matched_i (capped below)
            ),
            min_size=1,
            max_size=12,
        ),
        st.integers(min_value=1, max_value=6),
    )
    @settings(max_examples=200, deadline=None)
    def test_equal_keyword_count_identity(self, shape, k):
        results = []
        for i, (_, m) in enumerate(shape):
            matched = min(m, k)
            results.append(
                result([f"w{j}" for j in range(k)], [f"w{j}" for j in range(matched)],
                       case_id=f"c{i}")
            )
        assert global_match_rate(results) == average_match_rate(results)

    def test_rates_stay_in_unit_interval(self):
        rng = random.Random(3)
        for _ in range(100):
            results = [
                result([f"k{i}" for i in range(rng.randint(1, 5))], [])
                for _ in range(rng.randint(1, 5))
            ]
            for r in results:
                r.matched_keywords = r.keywords[: rng.randint(0, len(r.keywords))]
            assert 0.0 <= global_match_rate(results) <= 1.0
            assert 0.0 <= average_match_rate(results) <= 1.0


class TestPassRateAndLatency:
    def test_pass_rate_fraction(self):
        results = [result(["k"], [], judge_pass=i < 8, judge_score=5 if i < 8 else 2)
                   for i in range(10)]
        assert pass_rate(results) == 0.8

    def test_zero_passes(self):
        results = [result(["k"], [], judge_pass=False, judge_score=1) for _ in range(5)]
        assert pass_rate(results) == 0.0

    def test_denominator_counts_only_judged(self):
        results = [
            result(["k"], [], judge_pass=True, judge_score=5),
            result(["k"], []),  # unjudged
        ]
        assert pass_rate(results) == 1.0

    def test_no_judged_cases_raises(self):
        with pytest.raises(NoJudgeableCases):
            pass_rate([result(["k"], [])])

    def test_avg_latency(self):
        assert avg_latency([result(["k"], [], 1.0), result(["k"], [], 3.0)]) == 2.0

    def test_single_case_latency(self):
        assert avg_latency([result(["k"], [], 0.25)]) == 0.25


class TestJudgeCase:
    def case(self) -> BenchmarkCase:
        return BenchmarkCase(
            case_id="c", question="Q?", keywords=["k"], reference_answer="Ref."
        )

    def judge(self, reply: str):
        gateway = make_mock_gateway({"judge": {"default_response": reply}})
        return judge_case(gateway, "judge", self.case(), "candidate answer")

    def test_pass_at_threshold(self):
        assert self.judge("5") == (5, True, False)

    def test_fail_below_threshold(self):
        assert self.judge("3") == (3, False, False)

    def test_unparseable_reply_flagged(self):
        assert self.judge("excellent!") == (0, False, True)

    def test_first_integer_wins(self):
        assert self.judge("Score: 4/5 overall") == (4, True, False)

    def test_unjudgeable_case_rejected(self):
        gateway = make_mock_gateway({"judge": {"default_response": "5"}})
        case = BenchmarkCase(case_id="c", question="Q?", keywords=["k"])
        with pytest.raises(ValueError):
            judge_case(gateway, "judge", case, "answer")


class TestBenchmarkLoading:
    def test_bundled_datasets_load(self):
        knowledge = load_benchmark(data_path("benchmarks", "compliance_knowledge.jsonl"))
        regulation = load_benchmark(data_path("benchmarks", "regulation_knowledge.jsonl"))
        artifact = load_benchmark(data_path("benchmarks", "artifact_understanding.jsonl"))
        assert len(knowledge) == 20
        assert len(regulation) == 10
        assert len(artifact) == 20
        assert all(c.judgeable for c in knowledge + regulation)
        assert all(not c.judgeable for c in artifact)
        assert all(c.keywords for c in knowledge + regulation + artifact)


@pytest.fixture(scope="module")
def knowledge_cases():
    return load_benchmark(data_path("benchmarks", "compliance_knowledge.jsonl"))[:6]


@pytest.fixture(scope="module")
def artifact_cases():
    return load_benchmark(data_path("benchmarks", "artifact_understanding.jsonl"))[:6]


class TestRunEval:
    def test_four_conditions_n_matches(self, demo_orchestrator, knowledge_cases):
        reports = run_eval(
            demo_orchestrator, "knowledge", knowledge_cases,
            ["vanilla", "fasttrack", "fullagentic", "router"],
        )
        assert len(reports) == 4
        assert all(r.n == len(knowledge_cases) for r in reports)

    def test_judgeable_dataset_has_pass_rate(self, demo_orchestrator, knowledge_cases):
        reports = run_eval(demo_orchestrator, "knowledge", knowledge_cases, ["fasttrack"])
        assert reports[0].pass_rate is not None

    def test_artifact_dataset_omits_pass_rate(self, demo_orchestrator, artifact_cases):
        reports = run_eval(demo_orchestrator, "artifact", artifact_cases, ["fullagentic"])
        assert reports[0].pass_rate is None
        table = render_report_table(reports, "artifact")
        assert "Pass Rate" not in table

    def test_deterministic_match_rates_across_runs(self, demo_orchestrator, knowledge_cases):
        one = run_eval(demo_orchestrator, "knowledge", knowledge_cases, ["router"])[0]
        two = run_eval(demo_orchestrator, "knowledge", knowledge_cases, ["router"])[0]
        assert one.global_match_rate == two.global_match_rate
        assert one.average_match_rate == two.average_match_rate
        assert one.pass_rate == two.pass_rate

    def test_router_beats_vanilla_on_knowledge(self, demo_orchestrator, knowledge_cases):
        reports = run_eval(demo_orchestrator, "knowledge", knowledge_cases, ["vanilla", "router"])
        vanilla, router = reports
        assert router.average_match_rate > vanilla.average_match_rate

    def test_table_column_set(self, demo_orchestrator, knowledge_cases):
        reports = run_eval(demo_orchestrator, "knowledge", knowledge_cases, ["vanilla", "router"])
        table = render_report_table(reports, "knowledge")
        for column in ("Model", "Avg. Latency (s)", "Global Match Rate (%)",
                       "Average Match Rate (%)", "Pass Rate (%)"):
            assert column in table


class TestRunEvalFailures:
    def failing_orchestrator(self, tmp_path, broken_profile: str):
        from cba.config import AppConfig
        from cba.orchestrator import Orchestrator
        from .test_orchestrator import demo_config_dict
        from .conftest import write_config

        raw = demo_config_dict()
        slow = tmp_path / "slow.json"
        slow.write_text(json.dumps(
            {"rules": [], "default_response": "late", "default_delay": 5}
        ))
        for profile in raw["profiles"]:
            if profile["profile_name"] == broken_profile:
                profile["timeout"] = 0.05
                profile["mock_script"] = str(slow)
        return Orchestrator(AppConfig.from_file(write_config(tmp_path, raw)))

    def test_case_failures_count_as_misses(self, tmp_path, knowledge_cases):
        orchestrator = self.failing_orchestrator(tmp_path, "generator")
        report = run_eval(orchestrator, "knowledge", knowledge_cases[:3], ["fasttrack"])[0]
        assert report.case_errors == 3
        assert report.global_match_rate == 0.0
        assert report.average_match_rate == 0.0

    def test_judge_errors_leave_pass_rate_denominator(self, tmp_path, knowledge_cases):
        orchestrator = self.failing_orchestrator(tmp_path, "judge")
        report = run_eval(orchestrator, "knowledge", knowledge_cases[:3], ["fasttrack"])[0]
        assert report.judge_errors == 3
        assert report.pass_rate is None
        # Answers themselves still scored: the fast path was healthy.
        assert report.global_match_rate > 0.0
