"""Operator entry points: ingest, eval-router, eval, ask, serve.

Exit codes: 0 success, 1 runtime error, 2 usage/config error. Results go to
stdout, logs and traces to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path
from typing import Optional

from .config import ENV_CONFIG, MODES, AppConfig, locate_config
from .errors import CbaError, ConfigError
from .evalharness import CONDITIONS, load_benchmark, render_report_table, run_eval
from .orchestrator import Orchestrator
from .retrieval import ingest
from .router import LabeledQuerySet, evaluate_router, render_router_report


def data_path(*parts: str) -> Path:
    """Path to a bundled data file (demo config, corpora, benchmarks, mocks)."""
    return Path(str(resources.files("cba") / "data")).joinpath(*parts)


def _load_config(args) -> AppConfig:
    try:
        path = locate_config(getattr(args, "config", None))
    except ConfigError:
        path = str(data_path("demo", "config.json"))
        print(f"using bundled demo config: {path}", file=sys.stderr)
    config = AppConfig.from_file(path)
    if getattr(args, "artifacts", None):
        config.artifacts_path = args.artifacts
    if getattr(args, "index", None):
        config.retrieval.index_path = args.index
    return config


def cmd_ingest(args) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        print(f"corpus directory not found: {corpus}", file=sys.stderr)
        return 2
    try:
        index, stats = ingest(
            corpus,
            target_tokens=args.target_tokens,
            overlap_tokens=args.overlap_tokens,
            min_tokens=args.min_tokens,
        )
    except CbaError as e:
        print(f"ingest failed: {e}", file=sys.stderr)
        return 2
    index.save(args.out)
    print(
        f"documents: {stats.documents}\n"
        f"chunks: {stats.chunks_total}\n"
        f"kept: {stats.chunks_kept}\n"
        f"filtered: {stats.chunks_total - stats.chunks_kept}\n"
        f"index: {args.out}"
    )
    return 0


def cmd_eval_router(args) -> int:
    try:
        config = _load_config(args)
        queries = LabeledQuerySet.load_jsonl(args.queries)
    except (CbaError, OSError, json.JSONDecodeError, KeyError, ValueError) as e:
        print(f"load failed: {e}", file=sys.stderr)
        return 2
    orchestrator = Orchestrator(config)
    report = evaluate_router(
        config.router, orchestrator.gateway, queries, concurrency=config.eval.concurrency
    )
    print(render_router_report(report, model_label=config.router.profile_name))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_file = out_dir / "router_eval.json"
    out_file.write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
    print(f"wrote {out_file}", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    conditions = [c.strip() for c in args.conditions.split(",") if c.strip()]
    unknown = [c for c in conditions if c not in CONDITIONS]
    if unknown:
        print(
            f"unknown condition(s) {', '.join(unknown)}; valid: {', '.join(CONDITIONS)}",
            file=sys.stderr,
        )
        return 2
    try:
        config = _load_config(args)
        datasets = []
        for spec in args.dataset:
            path = Path(spec)
            datasets.append((path.stem, load_benchmark(path)))
    except (CbaError, OSError, json.JSONDecodeError, KeyError) as e:
        print(f"load failed: {e}", file=sys.stderr)
        return 2
    orchestrator = Orchestrator(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, cases in datasets:
        reports = run_eval(orchestrator, name, cases, conditions)
        table = render_report_table(reports, name)
        print(table)
        print()
        (out_dir / f"{name}_table.txt").write_text(table + "\n", encoding="utf-8")
        for condition, report in zip(conditions, reports):
            out_file = out_dir / f"{name}_{condition}.json"
            out_file.write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
    print(f"wrote reports to {out_dir}", file=sys.stderr)
    return 0


def cmd_ask(args) -> int:
    try:
        config = _load_config(args)
    except CbaError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    orchestrator = Orchestrator(config)
    session = orchestrator.sessions.get_or_create()
    result = orchestrator.handle_query(session, args.query, mode=args.mode)
    decision = result.trace.route_decision
    if (args.mode or config.mode) == "auto":
        print(f"[route] {decision.route.value} ({decision.parse_status.value})")
    print(result.answer)
    if args.trace:
        print(json.dumps(result.trace.to_dict(), indent=2), file=sys.stderr)
    return 1 if result.error else 0


def cmd_serve(args) -> int:
    try:
        config = _load_config(args)
    except CbaError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    if args.host:
        config.service.host = args.host
    if args.port:
        config.service.port = args.port
    from .service import serve

    serve(config, static_dir=args.static)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cba",
        description="Compliance assistant: routed retrieval + agent flows, eval harness.",
        epilog=f"Config resolution: --config flag, then ${ENV_CONFIG}, then the bundled demo.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="chunk, filter, and index a corpus directory")
    p.add_argument("--corpus", required=True, help="directory of .md/.txt files")
    p.add_argument("--out", default="index.json", help="index file to write")
    p.add_argument("--target-tokens", type=int, default=512)
    p.add_argument("--overlap-tokens", type=int, default=64)
    p.add_argument("--min-tokens", type=int, default=20)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("eval-router", help="score the router on a labeled query set")
    p.add_argument("--config")
    p.add_argument("--queries", required=True, help="JSONL of {query, expected}")
    p.add_argument("--out", default="eval_out")
    p.add_argument("--artifacts")
    p.add_argument("--index")
    p.set_defaults(func=cmd_eval_router)

    p = sub.add_parser("eval", help="run benchmark datasets under the given conditions")
    p.add_argument("--config")
    p.add_argument("--dataset", action="append", required=True, help="benchmark JSONL (repeatable)")
    p.add_argument("--conditions", default=",".join(CONDITIONS))
    p.add_argument("--out", default="eval_out")
    p.add_argument("--artifacts")
    p.add_argument("--index")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ask", help="answer one query and exit")
    p.add_argument("query")
    p.add_argument("--config")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--trace", action="store_true", help="print the turn trace to stderr")
    p.add_argument("--artifacts")
    p.add_argument("--index")
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config")
    p.add_argument("--static", help="directory of UI assets to serve at /")
    p.add_argument("--host", help="override the configured bind host")
    p.add_argument("--port", type=int, help="override the configured port")
    p.add_argument("--artifacts")
    p.add_argument("--index")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except CbaError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    sys.exit(main())
