"""Command-line entry points: index, simulate, train, serve, eval.

The --catalog/--logs/--model/--groups/--port flags may also come from the
environment with a SHELF_ prefix (SHELF_CATALOG, SHELF_PORT, ...); explicit
flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .behavior import InteractionLog, LogError, build_associations, build_coplay, load_logs_file
from .catalog import CatalogError, load_catalog_file
from .evaluate import run_eval
from .instant_index import build_index
from .organizer import OrganizerError, load_group_definitions_file
from .ranker import TrainConfig, label_from_logs, load_model_file, train
from .service import Engine, EngineSources, build_snapshot, create_app, run_search
from .simulate import SimConfig, write_log_jsonl


def _env_default(name: str):
    return os.environ.get(f"SHELF_{name.upper()}")


def _add_source_flags(parser: argparse.ArgumentParser, require_catalog: bool = True):
    catalog_default = _env_default("catalog")
    parser.add_argument(
        "--catalog",
        default=catalog_default,
        required=require_catalog and catalog_default is None,
        help="catalog JSONL file (env: SHELF_CATALOG)",
    )
    parser.add_argument("--logs", default=_env_default("logs"), help="interaction log JSONL (env: SHELF_LOGS)")
    parser.add_argument("--model", default=_env_default("model"), help="relevance model JSON (env: SHELF_MODEL)")
    parser.add_argument("--groups", default=_env_default("groups"), help="group definitions JSON (env: SHELF_GROUPS)")


def _load_inputs(args):
    catalog = load_catalog_file(args.catalog)
    log = load_logs_file(args.logs, catalog) if args.logs else InteractionLog()
    model = load_model_file(args.model) if getattr(args, "model", None) else None
    definitions = (
        load_group_definitions_file(args.groups) if getattr(args, "groups", None) else None
    )
    return catalog, log, model, definitions


def cmd_index(args) -> int:
    catalog, log, _, _ = _load_inputs(args)
    if catalog.entity_count() == 0:
        print("warning: catalog is empty; nothing to index", file=sys.stderr)
    index = build_index(catalog)
    coplay = build_coplay(log, args.min_support)
    assoc = build_associations(log)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stats = {
        "entities": catalog.entity_count(),
        "videos": len(catalog.videos),
        "talents": len(catalog.talents),
        "collections": len(catalog.collections),
        "prefixes": len(index.postings),
        "postings": sum(len(p) for p in index.postings.values()),
        "coplay_items": len(coplay.item_counts),
        "coplay_pairs": sum(len(n) for n in coplay.pair_counts.values()) // 2,
        "association_queries": len(assoc.selections),
    }
    (out / "stats.json").write_text(json.dumps(stats, sort_keys=True, indent=2) + "\n")
    models = {
        "coplay": {
            "min_support": coplay.min_support,
            "item_counts": {str(i): c for i, c in sorted(coplay.item_counts.items())},
            "pair_counts": {
                str(i): {str(j): c for j, c in sorted(neighbors.items())}
                for i, neighbors in sorted(coplay.pair_counts.items())
            },
        },
        "associations": {
            query: {str(e): c for e, c in sorted(counts.items())}
            for query, counts in sorted(assoc.selections.items())
        },
    }
    (out / "models.json").write_text(json.dumps(models, sort_keys=True) + "\n")
    print(json.dumps(stats, sort_keys=True))
    return 0


def cmd_simulate(args) -> int:
    catalog = load_catalog_file(args.catalog)
    config = SimConfig(
        n_profiles=args.profiles,
        n_fetch_sessions=args.fetch_sessions,
        n_explore_sessions=args.explore_sessions,
        seed=args.seed,
        explore_plays_per_session=args.plays_per_session,
        min_select_prefix=args.min_prefix,
    )
    with open(args.out, "w", encoding="utf-8") as handle:
        count = write_log_jsonl(config, catalog, handle)
    print(f"wrote {count} events to {args.out}")
    return 0


def cmd_train(args) -> int:
    catalog, log, _, definitions = _load_inputs(args)
    if not log.searches:
        print("error: training needs search events in --logs", file=sys.stderr)
        return 2
    bootstrap = build_snapshot(catalog, log, None, definitions)
    replay = lambda query: run_search(bootstrap, query).ranked
    examples, skipped = label_from_logs(log.searches, replay)
    if skipped:
        print(f"skipped {skipped} events with unreachable selections", file=sys.stderr)
    labels = {label for _, label in examples}
    if labels != {0, 1}:
        print("error: replayed labels are single-class; cannot train", file=sys.stderr)
        return 2
    result = train(examples, TrainConfig(learning_rate=args.lr, epochs=args.epochs, l2=args.l2))
    stride = max(1, args.epochs // 10)
    for epoch in range(0, len(result.losses), stride):
        print(f"epoch {epoch + 1:4d}  loss {result.losses[epoch]:.6f}")
    print(f"final loss {result.final_loss:.6f} over {len(examples)} examples")
    Path(args.out).write_text(result.model.to_json() + "\n")
    print(f"wrote model to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    sources = EngineSources(
        catalog_path=args.catalog,
        logs_path=args.logs,
        model_path=args.model,
        groups_path=args.groups,
    )
    # Build before binding the port so a bad input file fails fast.
    engine = Engine(sources)
    app = create_app(engine)
    if args.ui:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=args.ui, html=True), name="ui")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_eval(args) -> int:
    catalog, log, model, definitions = _load_inputs(args)
    report = run_eval(
        catalog,
        log,
        holdout=args.holdout,
        seed=args.seed,
        model=model,
        definitions=definitions,
        k=args.k,
        sim_provenance={"log_file": args.logs} if args.logs else None,
    )
    if args.report_dir:
        from .report import write_report_bundle

        written = write_report_bundle(report, args.report_dir)
        for path in written:
            print(f"wrote {path}")
    if args.out:
        Path(args.out).write_text(report.to_json() + "\n")
        print(f"wrote {args.out}")
    if not args.report_dir and not args.out:
        print(report.to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shelfsearch")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build and inspect snapshot artifacts")
    _add_source_flags(p)
    p.add_argument("--out", required=True, help="output directory for artifacts")
    p.add_argument("--min-support", type=int, default=1)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("simulate", help="generate a synthetic interaction log")
    _add_source_flags(p)
    p.add_argument("--out", required=True, help="output JSONL path")
    p.add_argument("--profiles", type=int, default=100)
    p.add_argument("--fetch-sessions", type=int, default=500)
    p.add_argument("--explore-sessions", type=int, default=500)
    p.add_argument("--plays-per-session", type=int, default=3)
    p.add_argument("--min-prefix", type=int, default=3, help="shortest typed prefix at selection time")
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="train the relevance model from click logs")
    _add_source_flags(p)
    p.add_argument("--out", required=True, help="output model JSON path")
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--l2", type=float, default=1e-4)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("serve", help="run the HTTP search service")
    _add_source_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument(
        "--port",
        type=int,
        default=int(_env_default("port") or 8000),
        help="listen port (env: SHELF_PORT)",
    )
    p.add_argument("--ui", default=None, help="optional static directory to mount at /ui")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("eval", help="replay held-out sessions and report metrics")
    _add_source_flags(p)
    p.add_argument("--holdout", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", default=None, help="write report JSON here instead of stdout")
    p.add_argument("--report-dir", default=None, help="write JSON + CSVs + figures into this directory")
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CatalogError, LogError, OrganizerError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
