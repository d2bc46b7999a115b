import json

import pytest

from cba.cli import data_path, main


@pytest.fixture
def demo_corpus() -> str:
    return str(data_path("demo", "corpus"))


class TestIngest:
    def test_demo_corpus_ingests(self, tmp_path, capsys, demo_corpus):
        out = tmp_path / "index.json"
        code = main(["ingest", "--corpus", demo_corpus, "--out", str(out)])
        assert code == 0
        printed = capsys.readouterr().out
        assert "documents: 11" in printed
        assert out.exists()
        assert json.loads(out.read_text())["format_version"] == 1

    def test_missing_corpus_exits_2(self, tmp_path):
        assert main(["ingest", "--corpus", str(tmp_path / "nope"), "--out", "x.json"]) == 2

    def test_empty_corpus_exits_2(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert main(["ingest", "--corpus", str(empty), "--out", str(tmp_path / "i.json")]) == 2

    def test_rerun_identical_counts(self, tmp_path, capsys, demo_corpus):
        main(["ingest", "--corpus", demo_corpus, "--out", str(tmp_path / "a.json")])
        first = capsys.readouterr().out.splitlines()[:4]
        main(["ingest", "--corpus", demo_corpus, "--out", str(tmp_path / "b.json")])
        second = capsys.readouterr().out.splitlines()[:4]
        assert first == second


class TestEvalRouter:
    def test_bundled_set_with_reference_mock(self, tmp_path, capsys):
        code = main([
            "eval-router",
            "--config", str(data_path("router", "eval_config.json")),
            "--queries", str(data_path("router", "eval_queries.jsonl")),
            "--out", str(tmp_path),
        ])
        assert code == 0
        printed = capsys.readouterr().out
        assert "86.7%" in printed
        report = json.loads((tmp_path / "router_eval.json").read_text())
        assert report["confusion"] == {
            "FastTrack/FastTrack": 7,
            "FastTrack/FullAgentic": 1,
            "FullAgentic/FastTrack": 1,
            "FullAgentic/FullAgentic": 6,
        }

    def test_missing_query_file_exits_2(self, tmp_path):
        code = main([
            "eval-router",
            "--config", str(data_path("demo", "config.json")),
            "--queries", str(tmp_path / "missing.jsonl"),
            "--out", str(tmp_path),
        ])
        assert code == 2


class TestEval:
    def test_unknown_condition_exits_2(self, tmp_path, capsys):
        code = main([
            "eval",
            "--config", str(data_path("demo", "config.json")),
            "--dataset", str(data_path("benchmarks", "regulation_knowledge.jsonl")),
            "--conditions", "vanilla,quantum",
            "--out", str(tmp_path),
        ])
        assert code == 2
        assert "quantum" in capsys.readouterr().err

    def test_regulation_two_conditions(self, tmp_path, capsys):
        code = main([
            "eval",
            "--config", str(data_path("demo", "config.json")),
            "--dataset", str(data_path("benchmarks", "regulation_knowledge.jsonl")),
            "--conditions", "vanilla,fasttrack",
            "--out", str(tmp_path),
        ])
        assert code == 0
        table = capsys.readouterr().out
        assert "Vanilla LLM" in table
        assert "FastTrack" in table
        report = json.loads((tmp_path / "regulation_knowledge_fasttrack.json").read_text())
        assert report["n"] == 10
        assert "pass_rate" in report


class TestAsk:
    def test_vanilla_ask_prints_answer(self, capsys):
        code = main([
            "ask", "--config", str(data_path("demo", "config.json")),
            "--mode", "vanilla", "what is data retention?",
        ])
        assert code == 0
        assert "grounded context" in capsys.readouterr().out

    def test_auto_mode_prints_route_first(self, capsys):
        code = main([
            "ask", "--config", str(data_path("demo", "config.json")),
            "--mode", "auto", "Who owns artifact ART-005?",
        ])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("[route] FullAgentic")
        assert "Aisha Okafor" in lines[1]

    def test_trace_flag_emits_trace_on_stderr(self, capsys):
        code = main([
            "ask", "--config", str(data_path("demo", "config.json")),
            "--mode", "fasttrack_only", "--trace",
            "What rights does the CCPA give consumers?",
        ])
        assert code == 0
        err = capsys.readouterr().err
        trace = json.loads(err[err.index("{"):])
        assert trace["route_decision"]["route"] == "FastTrack"
        assert trace["retrieval_hits"]


class TestUsageErrors:
    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_bad_config_path_exits_2(self, tmp_path):
        code = main([
            "ask", "--config", str(tmp_path / "nope.json"), "--mode", "vanilla", "q",
        ])
        assert code == 2
