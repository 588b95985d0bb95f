"""Command-line driver for the pipeline: build, inspect, query, evaluate, serve."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields

from .config import STRATEGIES, EngineConfig, config_from_items, load_config
from .engine import Engine
from .errors import ConfigError, NotFoundError, RecordFormatError, StageError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_STAGE = 3
EXIT_DATA = 4
EXIT_NOT_FOUND = 5


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="key=value config file")
    group = parser.add_argument_group("config overrides (mirror the config keys)")
    for field in fields(EngineConfig):
        group.add_argument(f"--{field.name}", metavar=field.type.upper(),
                           dest=f"cfg_{field.name}", default=None, help=argparse.SUPPRESS)


def _resolve_config(args: argparse.Namespace) -> EngineConfig:
    overrides = {
        field.name: getattr(args, f"cfg_{field.name}")
        for field in fields(EngineConfig)
        if getattr(args, f"cfg_{field.name}", None) is not None
    }
    if args.config:
        return load_config(args.config, overrides)
    return config_from_items(overrides)


def _cmd_index_build(engine: Engine, args: argparse.Namespace) -> int:
    stats = engine.build_index()
    print(f"ingested {stats.n_documents} documents, {stats.n_authors} authors, "
          f"{stats.n_associations} associations ({stats.docs_with_author} docs authored)")
    print(f"store ready under {engine.store_dir}")
    return EXIT_OK


def _cmd_profile_build(engine: Engine, args: argparse.Namespace) -> int:
    built = engine.build_profiles()
    print(f"built {built} author profiles under {engine.store_dir / 'profiles'}")
    return EXIT_OK


def _cmd_profile_show(engine: Engine, args: argparse.Namespace) -> int:
    engine.load()
    author = engine.store.author(args.author_id)
    profile = engine.profiles[author.author_id]
    print(f"{author.author_id}\t{author.display_name}")
    if not profile.nodes:
        print("(empty profile)")
        return EXIT_OK
    print(f"{len(profile.nodes)} entities, {len(profile.edges)} edges")
    print("rank\tentity\trelevance\trho\tdocs")
    for position, entity_id in enumerate(profile.ordered_entities, start=1):
        print(f"{position}\t{entity_id}\t{profile.relevance[entity_id]:.6f}"
              f"\t{profile.rho[entity_id]:.3f}\t{profile.doc_count[entity_id]}")
    return EXIT_OK


def _cmd_query(engine: Engine, args: argparse.Namespace) -> int:
    engine.load()
    response = engine.search(args.text, strategy=args.strategy, limit=args.limit,
                             with_explanations=args.explain)
    if response.query_entities:
        print("query entities: " + ", ".join(response.query_entities))
    if response.empty_query:
        print("query matches no entity and no indexed term")
        return EXIT_OK
    print("rank\tauthor\tname\tscore\tsub-scores")
    for result in response.results:
        subs = " ".join(f"{k}={v:.6f}" for k, v in sorted(result.sub_scores.items()))
        print(f"{result.rank}\t{result.author_id}\t{result.display_name}"
              f"\t{result.score:.6f}\t{subs}")
        if args.explain and result.explanation and result.explanation.contributions:
            for c in result.explanation.contributions:
                marker = "profile" if c.in_profile else "absent"
                print(f"\t\t{c.entity_id}: {c.contribution:.6f} ({marker})")
    return EXIT_OK


def _cmd_batch_eval(engine: Engine, args: argparse.Namespace) -> int:
    engine.load()
    strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
    out_dir = args.out or str(engine.store_dir / "eval")
    reports = engine.batch_eval(args.queries, args.qrels, out_dir, strategies)
    for strategy in strategies:
        means = reports[strategy].means
        summary = " ".join(f"{m}={means[m]:.4f}" for m in sorted(means))
        print(f"{strategy}: {summary}")
    print(f"run files, reports and t-tests written to {out_dir}")
    return EXIT_OK


def _cmd_serve(engine: Engine, args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    engine.load()
    app = create_app(engine)
    uvicorn.run(app, host=engine.config.http_host, port=engine.config.http_port,
                log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expertsearch",
        description="Entity-graph expert finding: build indexes, rank authors, serve the API.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    _add_config_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    index_parser = sub.add_parser("index", help="corpus and entity artifacts")
    index_sub = index_parser.add_subparsers(dest="subcommand", required=True)
    index_build = index_sub.add_parser("build", help="ingest corpus, annotate, embed")
    index_build.set_defaults(func=_cmd_index_build)

    profile_parser = sub.add_parser("profile", help="author profiles")
    profile_sub = profile_parser.add_subparsers(dest="subcommand", required=True)
    profile_build = profile_sub.add_parser("build", help="build one profile per author")
    profile_build.set_defaults(func=_cmd_profile_build)
    profile_show = profile_sub.add_parser("show", help="print one author's profile")
    profile_show.add_argument("author_id")
    profile_show.set_defaults(func=_cmd_profile_show)

    query_parser = sub.add_parser("query", help="rank authors for a query")
    query_parser.add_argument("text")
    query_parser.add_argument("--strategy", choices=STRATEGIES, default="fused")
    query_parser.add_argument("--limit", type=int, default=10)
    query_parser.add_argument("--explain", action="store_true",
                              help="print per-entity contributions")
    query_parser.set_defaults(func=_cmd_query)

    eval_parser = sub.add_parser("batch-eval", help="run queries, score against qrels")
    eval_parser.add_argument("queries", help="query_id<TAB>text file")
    eval_parser.add_argument("qrels", help="TREC qrels file")
    eval_parser.add_argument("--out", default=None, help="output directory (default store/eval)")
    eval_parser.add_argument("--strategies", default=",".join(STRATEGIES),
                             help="comma-separated subset of: " + ", ".join(STRATEGIES))
    eval_parser.set_defaults(func=_cmd_batch_eval)

    serve_parser = sub.add_parser("serve", help="start the HTTP service")
    serve_parser.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = _resolve_config(args)
        engine = Engine(config)
        return args.func(engine, args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as err:
        print(f"stage error: {err}", file=sys.stderr)
        return EXIT_STAGE
    except RecordFormatError as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except NotFoundError as err:
        print(f"not found: {err}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except FileNotFoundError as err:
        print(f"data error: {err}", file=sys.stderr)
        return EXIT_DATA
    except Exception as err:  # pragma: no cover - last-resort guard
        log.exception("unexpected failure")
        print(f"unexpected error: {err}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    raise SystemExit(main())
