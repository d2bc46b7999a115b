import pytest

from cba.cli import data_path
from cba.core import ParseStatus, Route
from cba.errors import ConfigError, RouterUnavailable
from cba.router import (
    LabeledQuerySet,
    RouterConfig,
    build_router_prompt,
    evaluate_router,
    parse_route_reply,
    render_router_report,
    route,
)

from .conftest import make_mock_gateway

TEN_EXAMPLES = [
    (f"generic question number {i}", Route.FASTTRACK) for i in range(5)
] + [
    (f"artifact question number {i}", Route.FULLAGENTIC) for i in range(5)
]


def config_with_examples() -> RouterConfig:
    return RouterConfig(examples=TEN_EXAMPLES, profile_name="router")


class TestBuildPrompt:
    def test_all_examples_verbatim_in_order(self):
        config = config_with_examples()
        system = build_router_prompt(config, "what now?")[0][1]
        positions = [system.index(q) for q, _ in config.examples]
        assert positions == sorted(positions)
        assert len(positions) == 10

    def test_empty_history_gives_bare_query_message(self):
        config = config_with_examples()
        role, content = build_router_prompt(config, "route me")[-1]
        assert role == "user"
        assert content == "Query: route me"

    def test_deterministic(self):
        config = config_with_examples()
        assert build_router_prompt(config, "q", "h") == build_router_prompt(config, "q", "h")

    def test_output_instruction_present(self):
        system = build_router_prompt(config_with_examples(), "q")[0][1]
        assert "exactly one token" in system

    def test_examples_must_cover_both_labels(self):
        with pytest.raises(ConfigError):
            RouterConfig(examples=[("only one side", Route.FASTTRACK)])


class TestParseReply:
    def test_exact_token(self):
        assert parse_route_reply("FastTrack", Route.FULLAGENTIC) == (
            Route.FASTTRACK, ParseStatus.PARSED
        )

    def test_token_inside_prose(self):
        assert parse_route_reply("I think FullAgentic is best.", Route.FASTTRACK) == (
            Route.FULLAGENTIC, ParseStatus.PARSED
        )

    def test_both_tokens_fall_back(self):
        assert parse_route_reply("either FastTrack or FullAgentic", Route.FULLAGENTIC) == (
            Route.FULLAGENTIC, ParseStatus.FALLBACK
        )

    def test_neither_token_falls_back(self):
        assert parse_route_reply("hmm", Route.FASTTRACK) == (
            Route.FASTTRACK, ParseStatus.FALLBACK
        )

    def test_case_insensitive(self):
        assert parse_route_reply("fasttrack!", Route.FULLAGENTIC)[0] is Route.FASTTRACK


class TestRoute:
    def test_scripted_decision(self):
        gateway = make_mock_gateway(
            {"router": {"rules": [{"contains": "ART-", "response": "FullAgentic"}],
                        "default_response": "FastTrack"}}
        )
        config = config_with_examples()
        decision = route(config, gateway, "who owns ART-001?")
        assert decision.route is Route.FULLAGENTIC
        assert decision.parse_status is ParseStatus.PARSED
        assert decision.decision_latency >= 0

    def test_backend_failure_raises_router_unavailable(self):
        gateway = make_mock_gateway(
            {"router": {"rules": [{"contains": "q", "response": "x", "delay": 9}]}},
            timeout=0.05,
        )
        with pytest.raises(RouterUnavailable):
            route(config_with_examples(), gateway, "q")

    def test_identical_runs_identical_routes(self):
        gateway = make_mock_gateway({"router": {"default_response": "FastTrack"}})
        config = config_with_examples()
        routes = {route(config, gateway, "same query").route for _ in range(5)}
        assert routes == {Route.FASTTRACK}


def table_pattern_gateway():
    """Mock reproducing the bundled eval set's reference answer pattern."""
    script_path = data_path("router", "eval_mock.json")
    import json

    gateway = make_mock_gateway({"router": json.loads(script_path.read_text())})
    return gateway


class TestEvaluateRouter:
    def test_reference_confusion_pattern(self):
        queries = LabeledQuerySet.load_jsonl(data_path("router", "eval_queries.jsonl"))
        report = evaluate_router(config_with_examples(), table_pattern_gateway(), queries)
        fast, full = Route.FASTTRACK, Route.FULLAGENTIC
        assert report.cells == {
            (fast, fast): 7, (fast, full): 1, (full, fast): 1, (full, full): 6,
        }
        assert report.precision[fast] == pytest.approx(7 / 8)
        assert report.recall[fast] == pytest.approx(7 / 8)
        assert report.precision[full] == pytest.approx(6 / 7)
        assert report.recall[full] == pytest.approx(6 / 7)
        assert report.accuracy == pytest.approx(13 / 15)
        assert report.errors == 0

    def test_always_correct_mock_gives_perfect_metrics(self):
        queries = LabeledQuerySet([("alpha beta", Route.FASTTRACK), ("gamma ART", Route.FULLAGENTIC)])
        gateway = make_mock_gateway(
            {"router": {"rules": [
                {"contains": "alpha beta", "response": "FastTrack"},
                {"contains": "gamma ART", "response": "FullAgentic"},
            ], "default_response": "FastTrack"}}
        )
        report = evaluate_router(config_with_examples(), gateway, queries)
        assert report.accuracy == 1.0
        assert report.precision[Route.FASTTRACK] == 1.0
        assert report.precision[Route.FULLAGENTIC] == 1.0

    def test_single_item_wrong_prediction(self):
        queries = LabeledQuerySet([("lone question", Route.FASTTRACK)])
        gateway = make_mock_gateway({"router": {"default_response": "FullAgentic"}})
        report = evaluate_router(config_with_examples(), gateway, queries)
        assert report.accuracy == 0.0
        assert report.recall[Route.FASTTRACK] == 0.0
        # No FullAgentic-labelled items: recall undefined for that class.
        assert report.recall[Route.FULLAGENTIC] is None

    def test_cells_sum_to_n_minus_errors(self):
        queries = LabeledQuerySet(
            [("fine question", Route.FASTTRACK), ("SLOW one", Route.FULLAGENTIC)]
        )
        gateway = make_mock_gateway(
            {"router": {"rules": [{"contains": "SLOW", "response": "x", "delay": 9}],
                        "default_response": "FastTrack"}},
            timeout=0.05,
        )
        report = evaluate_router(config_with_examples(), gateway, queries)
        assert report.errors == 1
        assert sum(report.cells.values()) == report.total - report.errors

    def test_duplicate_queries_rejected(self):
        with pytest.raises(ConfigError):
            LabeledQuerySet([("same", Route.FASTTRACK), ("same", Route.FULLAGENTIC)])

    def test_report_renders_three_blocks(self):
        queries = LabeledQuerySet([("one question", Route.FASTTRACK), ("two question", Route.FULLAGENTIC)])
        gateway = make_mock_gateway({"router": {"default_response": "FastTrack"}})
        text = render_router_report(evaluate_router(config_with_examples(), gateway, queries))
        assert "(a) Confusion matrix" in text
        assert "(b) Classification metrics" in text
        assert "(c) Average latency per request" in text
