#!/usr/bin/env python3
"""Agent-vs-agent matches on the bundled hex map.

Plays seeded games between any two of {mcts, scripted, random} with a
chosen forward model and prints the win/loss/eval summary table.

Usage:
    python scripts/match_experiment.py --a mcts --b random --games 10 \
        --budget 2000 [--model decreasing]
"""
import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from combatsim.cli import DATA_DIR, DEFAULT_CATALOG
from combatsim.core import static_dpf
from combatsim.evaluation import ModelSpec
from combatsim.hlgame import Variant, load_map, load_scenario
from combatsim.mcts import MctsConfig, run_matches
from combatsim.policies import destroy_score_policy
from combatsim.types import Catalog


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--a", default="mcts", choices=("mcts", "scripted", "random"))
    parser.add_argument("--b", default="random", choices=("mcts", "scripted", "random"))
    parser.add_argument("--games", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=2000)
    parser.add_argument("--model", default="decreasing",
                        choices=("lanchester", "sustained", "decreasing"))
    parser.add_argument("--map", default=str(DATA_DIR / "maps" / "hexring6.json"))
    parser.add_argument("--scenario",
                        default=str(DATA_DIR / "scenarios" / "clash_mt.json"))
    parser.add_argument("--variant", default="r-mb")
    parser.add_argument("--max-frames", type=int, default=28_800)
    args = parser.parse_args()

    catalog = Catalog.load(DEFAULT_CATALOG)
    variant = Variant(args.variant)
    graph = load_map(args.map, variant)
    scenario = load_scenario(args.scenario)
    resolver = ModelSpec(
        kind=args.model, dpf_table=static_dpf(catalog),
        policy=destroy_score_policy(), catalog=catalog,
    ).make_runner()
    cfg = MctsConfig(playout_budget=args.budget, seed=args.seed)

    start = time.perf_counter()
    results, summary = run_matches(
        graph, scenario, args.a, args.b, cfg, resolver, catalog,
        games=args.games, variant=variant, max_frames=args.max_frames,
        seed=args.seed,
    )
    elapsed = time.perf_counter() - start
    for i, r in enumerate(results):
        print(f"game {i}: winner={r.winner or 'timeout'} eval={r.final_eval:+.3f} "
              f"length={r.length}")
    row = summary.row()
    print(f"\n{row['configuration']}: win {row['win_pct']}% loss {row['loss_pct']}% "
          f"avg_eval {row['avg_eval']} avg_length {row['avg_length']} "
          f"({elapsed:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
