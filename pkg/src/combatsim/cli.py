"""Command-line interface: simulate, detect, learn, evaluate, bench, play.

Every subcommand is reproducible from its inputs and --seed; outputs
embed a format_version and the invocation line for provenance. Exit
codes: 0 success, 2 validation error, 3 runtime error. With
--format json, errors are emitted as JSON on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import __version__
from .core import DpfTable, static_dpf
from .dataset import (
    CombatDataset,
    dataset_stats,
    detect_combats,
    filter_for_training,
    read_trace,
    write_trace,
)
from .errors import CombatSimError, ValidationError
from .evaluation import (
    ModelSpec,
    benchmark_models,
    benchmark_to_csv,
    cross_validate,
    evaluate_model,
    reports_to_csv,
    reports_to_json,
)
from .hlgame import Variant, load_map, load_scenario
from .learning import (
    learn_borda_policy,
    learn_dpf_detailed,
    load_model_file,
    make_folds,
    save_model_file,
)
from .mcts import MctsConfig, run_matches
from .models import Winner
from .policies import (
    TargetSelectionPolicy,
    borda_policy,
    destroy_score_policy,
    random_policy,
)
from .synthetic import PROFILES, SyntheticConfig, generate_dataset, generate_traces
from .types import Catalog, CombatState, unit_from_json, unit_to_json

DATA_DIR = Path(__file__).parent / "data"
DEFAULT_CATALOG = DATA_DIR / "catalogs" / "starcraft_basic.json"
COMBAT_STATE_FORMAT_VERSION = 1


def _invocation() -> str:
    return "combatsim " + " ".join(sys.argv[1:])


def _load_catalog(args) -> Catalog:
    path = args.catalog or os.environ.get("COMBATSIM_CATALOG") or DEFAULT_CATALOG
    return Catalog.load(path)


def _load_policy(args, catalog: Catalog) -> TargetSelectionPolicy:
    kind = getattr(args, "policy", "destroy_score")
    if kind == "random":
        return random_policy(getattr(args, "seed", 0) or 0)
    if kind == "destroy_score":
        return destroy_score_policy()
    model_path = getattr(args, "dpf", None)
    if not model_path or model_path == "static":
        raise ValidationError("borda policy requires --dpf MODEL_FILE with learned scores")
    _ref, _table, borda, _meta = load_model_file(model_path)
    if borda is None:
        raise ValidationError(f"model file {model_path} carries no borda scores")
    return borda_policy(borda)


def _load_dpf(args, catalog: Catalog) -> DpfTable:
    source = getattr(args, "dpf", "static") or "static"
    if source == "static":
        return static_dpf(catalog)
    ref, table, _borda, _meta = load_model_file(source)
    if ref != catalog.name:
        raise ValidationError(
            f"model file was learned for catalog {ref!r}, not {catalog.name!r}"
        )
    if table.k != catalog.k:
        raise ValidationError("model file size does not match the catalog")
    return table


def _write_output(args, text: str) -> None:
    out = getattr(args, "out", None) or os.environ.get("COMBATSIM_OUT")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json_payload(args, body: dict) -> str:
    return json.dumps(
        {"format_version": 1, "invocation": _invocation(), **body}, indent=2
    )


def _load_combat_state(path: str) -> tuple[CombatState, str]:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("format_version") != COMBAT_STATE_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported combat state format_version {data.get('format_version')!r}"
        )
    state = CombatState(
        army_a=tuple(unit_from_json(u) for u in data["army_a"]),
        army_b=tuple(unit_from_json(u) for u in data["army_b"]),
    )
    return state, data.get("catalog_ref", "")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_simulate(args) -> int:
    catalog = _load_catalog(args)
    state, _ref = _load_combat_state(args.state)
    table = _load_dpf(args, catalog)
    policy = _load_policy(args, catalog)
    spec = ModelSpec(
        kind=args.model, dpf_table=table, policy=policy, catalog=catalog,
        oracle_max_frames=args.oracle_frames,
    )
    out = spec.simulate(state)
    body = {
        "model": out.model_id,
        "winner": out.winner.value,
        "duration_frames": out.duration_frames,
        "survivors_a": [unit_to_json(u) for u in out.survivors_a],
        "survivors_b": [unit_to_json(u) for u in out.survivors_b],
        "kills": [[f, uid] for f, uid in out.kills],
    }
    _write_output(args, _json_payload(args, body))
    return 0


def cmd_detect(args) -> int:
    catalog = _load_catalog(args)
    events, catalog_ref = read_trace(args.trace)
    records = detect_combats(events, catalog, peace_window=args.peace_window)
    ds = CombatDataset(
        records=tuple(records),
        catalog_ref=catalog_ref or catalog.name,
        source=f"detected:{args.trace}",
    )
    _write_output(args, json.dumps(ds.to_json()))
    return 0


def cmd_learn(args) -> int:
    catalog = _load_catalog(args)
    ds = CombatDataset.load(args.dataset)
    train = filter_for_training(ds, catalog) if args.filter else ds
    if not train.records:
        raise ValidationError("no trainable records after filtering")
    table, _acc, report = learn_dpf_detailed(
        train, catalog, include_passive_in_counts=args.include_passive
    )
    policy = learn_borda_policy(train, catalog)
    out = args.out or "model.json"
    save_model_file(
        out,
        catalog.name,
        table,
        policy.borda,
        metadata={
            "invocation": _invocation(),
            "records_used": report.records_used,
            "uncovered_pairs": len(report.uncovered_pairs),
            "skipped_kills": report.skipped_kills,
        },
    )
    sys.stdout.write(
        f"learned dpf + borda from {report.records_used} combats -> {out}\n"
        f"uncovered attackable pairs: {len(report.uncovered_pairs)}\n"
    )
    return 0


def _model_specs(args, catalog: Catalog) -> list[ModelSpec]:
    table = _load_dpf(args, catalog)
    policy = _load_policy(args, catalog)
    kinds = [k.strip() for k in args.models.split(",") if k.strip()]
    return [
        ModelSpec(kind=kind, dpf_table=table, policy=policy, catalog=catalog,
                  oracle_max_frames=args.oracle_frames)
        for kind in kinds
    ]


def cmd_evaluate(args) -> int:
    catalog = _load_catalog(args)
    ds = CombatDataset.load(args.dataset)
    ds = filter_for_training(ds, catalog) if args.filter else ds
    if args.folds:
        split = make_folds(ds, args.folds, seed=args.seed)
        kinds = tuple(k.strip() for k in args.models.split(",") if k.strip())
        reports = list(cross_validate(ds, catalog, split, kinds=kinds).values())
    else:
        reports = [evaluate_model(spec, ds) for spec in _model_specs(args, catalog)]
    if args.format == "csv":
        _write_output(args, reports_to_csv(reports))
    else:
        _write_output(args, reports_to_json(reports, invocation=_invocation()))
    return 0


def cmd_bench(args) -> int:
    catalog = _load_catalog(args)
    ds = CombatDataset.load(args.dataset)
    rows = benchmark_models(_model_specs(args, catalog), ds, repetitions=args.repetitions)
    if args.format == "csv":
        _write_output(args, benchmark_to_csv(rows))
    else:
        _write_output(args, _json_payload(args, {"benchmark": rows}))
    return 0


def cmd_play(args) -> int:
    catalog = _load_catalog(args)
    variant = Variant(args.variant)
    graph = load_map(args.map, variant)
    scenario = load_scenario(args.scenario)
    cfg = MctsConfig(
        epsilon=args.epsilon,
        max_tree_depth=args.depth,
        playout_length=args.playout_length,
        playout_budget=args.budget,
        plan_interval=args.plan_interval,
        seed=args.seed,
    )
    table = _load_dpf(args, catalog)
    policy = _load_policy(args, catalog)
    spec = ModelSpec(kind=args.model, dpf_table=table, policy=policy, catalog=catalog)
    results, summary = run_matches(
        graph, scenario, args.a, args.b, cfg, spec.make_runner(), catalog,
        games=args.games, variant=variant, max_frames=args.max_frames,
        seed=args.seed, log_path=args.match_log, workers=args.workers,
        resolver_spec=spec,
    )
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(
            buf, fieldnames=["configuration", "games", "avg_eval", "win_pct",
                             "loss_pct", "avg_length"])
        writer.writeheader()
        writer.writerow(summary.row())
        _write_output(args, buf.getvalue())
    else:
        body = {
            "summary": summary.row(),
            "games": [
                {"winner": r.winner, "final_eval": round(r.final_eval, 4),
                 "length": r.length, "cycles": r.cycles}
                for r in results
            ],
        }
        _write_output(args, _json_payload(args, body))
    return 0


def cmd_stats(args) -> int:
    catalog = _load_catalog(args)
    ds = CombatDataset.load(args.dataset)
    ds.validate_against(catalog)
    stats = dataset_stats(ds)
    _write_output(args, _json_payload(args, {"stats": stats.to_json()}))
    return 0


def cmd_gen_synthetic(args) -> int:
    catalog = _load_catalog(args)
    cfg = SyntheticConfig(
        n_combats=args.combats,
        seed=args.seed,
        profile=args.profile,
        targeting=args.targeting,
        max_units_per_side=args.max_units,
    )
    policy = _load_policy(args, catalog)
    if args.kind == "dataset":
        ds = generate_dataset(catalog, cfg, policy=policy)
        _write_output(args, json.dumps(ds.to_json()))
    else:
        events = generate_traces(catalog, cfg, policy=policy)
        out = args.out or "trace.ndjson"
        write_trace(out, events, catalog_ref=catalog.name)
        sys.stdout.write(f"wrote {len(events)} events -> {out}\n")
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combatsim",
        description="Attrition-combat models: simulate, learn, evaluate, play.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=0):
        p.add_argument("--catalog", help="unit-type catalog JSON (env COMBATSIM_CATALOG)")
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--out", help="output path (env COMBATSIM_OUT); stdout otherwise")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    def model_params(p):
        p.add_argument("--dpf", default="static",
                       help="'static' or a learned model file (default: static)")
        p.add_argument("--policy", choices=("random", "destroy_score", "borda"),
                       default="destroy_score")
        p.add_argument("--oracle-frames", type=int, default=20_000,
                       help="tick-oracle frame cap")

    p = sub.add_parser("simulate", help="run one combat through a model")
    common(p)
    model_params(p)
    p.add_argument("--model", required=True,
                   choices=("lanchester", "sustained", "decreasing", "oracle"))
    p.add_argument("--state", required=True, help="combat state JSON file")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("detect", help="extract combat records from a trace")
    common(p)
    p.add_argument("--trace", required=True, help="NDJSON unit-event trace")
    p.add_argument("--peace-window", type=int, default=144)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("learn", help="learn DPF matrix and borda policy")
    common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--no-filter", dest="filter", action="store_false",
                   help="skip the training filter (army-destroyed, no mines, both fought)")
    p.add_argument("--include-passive", action="store_true",
                   help="count passive units in damage-split denominators")
    p.set_defaults(func=cmd_learn, filter=True)

    p = sub.add_parser("evaluate", help="score models against a dataset")
    common(p)
    model_params(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--models", default="lanchester,sustained,decreasing",
                   help="comma list of lanchester,sustained,decreasing,oracle,ltd,ltd2")
    p.add_argument("--folds", type=int, default=0,
                   help="cross-validate with learned parameters instead of --dpf")
    p.add_argument("--no-filter", dest="filter", action="store_false")
    p.set_defaults(func=cmd_evaluate, filter=True)

    p = sub.add_parser("bench", help="wall-time per model over a dataset")
    common(p)
    model_params(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--models", default="lanchester,sustained,decreasing")
    p.add_argument("--repetitions", type=int, default=5)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("play", help="run abstract-game matches")
    common(p)
    model_params(p)
    p.add_argument("--map", required=True)
    p.add_argument("--scenario", required=True)
    p.add_argument("--a", required=True, choices=("mcts", "scripted", "random"))
    p.add_argument("--b", required=True, choices=("mcts", "scripted", "random"))
    p.add_argument("--games", type=int, default=1)
    p.add_argument("--model", default="decreasing",
                   choices=("lanchester", "sustained", "decreasing", "oracle"))
    p.add_argument("--variant", default="r-mb",
                   choices=tuple(v.value for v in Variant))
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--playout-length", type=int, default=2880)
    p.add_argument("--plan-interval", type=int, default=400)
    p.add_argument("--max-frames", type=int, default=28_800)
    p.add_argument("--match-log", help="JSONL per-cycle log path")
    p.add_argument("--workers", type=int, default=1,
                   help="fan games out over processes; merged by game index")
    p.set_defaults(func=cmd_play)

    p = sub.add_parser("stats", help="dataset summary statistics")
    common(p)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen-synthetic", help="oracle-generated datasets or traces")
    common(p)
    p.add_argument("--combats", type=int, required=True)
    p.add_argument("--profile", choices=PROFILES, default="mixed")
    p.add_argument("--kind", choices=("dataset", "traces"), default="dataset")
    p.add_argument("--targeting", choices=("focus", "spread"), default="focus")
    p.add_argument("--max-units", type=int, default=8)
    p.add_argument("--policy", choices=("random", "destroy_score"),
                   default="destroy_score")
    p.set_defaults(func=cmd_gen_synthetic)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        _emit_error(args, "validation", exc)
        return 2
    except (CombatSimError, OSError, json.JSONDecodeError, KeyError) as exc:
        _emit_error(args, "runtime", exc)
        return 3


def _emit_error(args, kind: str, exc: Exception) -> None:
    if getattr(args, "format", "json") == "json":
        sys.stderr.write(json.dumps({"error": kind, "message": str(exc)}) + "\n")
    else:
        sys.stderr.write(f"{kind} error: {exc}\n")


if __name__ == "__main__":
    sys.exit(main())
