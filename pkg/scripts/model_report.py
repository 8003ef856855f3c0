#!/usr/bin/env python3
"""End-to-end model comparison on a synthetic corpus.

Generates an oracle-simulated dataset, learns effective DPF and a Borda
policy with 10-fold cross-validation, and prints accuracy / similarity /
timing tables for every model with static and learned parameters.

Usage:
    python scripts/model_report.py [--combats 2000] [--seed 7] [--out report.csv]
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from combatsim.cli import DEFAULT_CATALOG
from combatsim.core import static_dpf
from combatsim.dataset import CombatDataset, EndReason
from combatsim.evaluation import (
    ModelSpec,
    benchmark_models,
    benchmark_to_csv,
    cross_validate,
    evaluate_model,
    reports_to_csv,
)
from combatsim.learning import make_folds
from combatsim.policies import destroy_score_policy
from combatsim.synthetic import SyntheticConfig, generate_dataset
from combatsim.types import Catalog


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--combats", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--catalog", default=str(DEFAULT_CATALOG))
    parser.add_argument("--out", help="write the CSV here instead of stdout")
    args = parser.parse_args()

    catalog = Catalog.load(args.catalog)
    print(f"generating {args.combats} synthetic combats (seed {args.seed})...")
    ds = generate_dataset(
        catalog, SyntheticConfig(n_combats=args.combats, seed=args.seed)
    )
    kept = CombatDataset(
        records=tuple(r for r in ds.records if r.reason is EndReason.ARMY_DESTROYED),
        catalog_ref=ds.catalog_ref,
        source=ds.source,
    )
    print(f"{len(kept)} army-destroyed combats kept for evaluation")

    reports = []
    static_table = static_dpf(catalog)
    policy = destroy_score_policy()
    for kind in ("lanchester", "sustained", "decreasing", "ltd", "ltd2"):
        spec = ModelSpec(
            kind=kind, dpf_table=static_table, policy=policy, catalog=catalog,
            label=f"{kind}",
        )
        reports.append(evaluate_model(spec, kept))

    split = make_folds(kept, 10, seed=args.seed)
    reports.extend(cross_validate(kept, catalog, split).values())

    csv_text = reports_to_csv(reports)
    if args.out:
        Path(args.out).write_text(csv_text)
        print(f"wrote {args.out}")
    else:
        print(csv_text)

    specs = [
        ModelSpec(kind=k, dpf_table=static_table, policy=policy, catalog=catalog)
        for k in ("lanchester", "sustained", "decreasing")
    ]
    print(benchmark_to_csv(benchmark_models(specs, kept, repetitions=3)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
