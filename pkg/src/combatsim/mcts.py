"""Monte Carlo tree search over the abstract game, plus a match runner.

Simultaneous moves are serialized with an alternation rule: even tree
depths choose for the searching player, odd depths for the opponent, and
the game steps once both plies of a pair are chosen. Rewards are stored
from the searcher's perspective; opponent plies select by minimum.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .core import destroy_score  # noqa: F401  (re-exported for callers)
from .errors import ValidationError
from .hlgame import (
    CombatResolver,
    GroupAction,
    GroupKey,
    HighLevelState,
    RegionGraph,
    Variant,
    abstract_from_units,
    canonical_action_set,
    enumerate_action_sets,
    idle_action_set,
    random_policy,
    rollout_step,
    scripted_policy,
    step,
)
from .types import Catalog, Unit

AGENT_KINDS = ("mcts", "scripted", "random")


@dataclass(frozen=True)
class MctsConfig:
    epsilon: float = 0.2
    max_tree_depth: int = 10
    playout_length: int = 2880
    playout_budget: int = 10_000
    plan_interval: int = 400
    simultaneous_policy: str = "alt"
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError("epsilon must be in [0, 1]")
        if min(self.max_tree_depth, self.playout_length, self.playout_budget,
               self.plan_interval) <= 0:
            raise ValidationError("all budgets must be > 0")
        if self.simultaneous_policy != "alt":
            raise ValidationError("only the alternation policy is supported")


def evaluate_state(state: HighLevelState, player: int, catalog: Catalog) -> float:
    """Material balance in [-1, 1]: destroy-score mass, mine vs theirs."""
    scores = catalog.destroy_scores
    mine = theirs = 0.0
    for g in state.groups:
        value = g.size * scores[g.type_id]
        if g.player == player:
            mine += value
        else:
            theirs += value
    total = mine + theirs
    if total == 0:
        return 0.0
    return 2.0 * mine / total - 1.0


class _Node:
    """One ply. Even depths move the searcher, odd depths the opponent."""

    __slots__ = ("state", "depth", "pending", "untried", "children", "visits", "total")

    def __init__(self, state: HighLevelState, depth: int,
                 pending: dict[GroupKey, GroupAction] | None,
                 untried: list[dict[GroupKey, GroupAction]]):
        self.state = state
        self.depth = depth
        self.pending = pending  # searcher's half-move awaiting the opponent's
        self.untried = untried
        self.children: list[_Node] = []
        self.visits = 0
        self.total = 0.0


def _terminal(state: HighLevelState) -> bool:
    return state.eliminated(0) or state.eliminated(1)


class _Search:
    def __init__(self, player: int, cfg: MctsConfig, resolver: CombatResolver,
                 catalog: Catalog, rng: random.Random):
        self.player = player
        self.cfg = cfg
        self.resolver = resolver
        self.catalog = catalog
        self.rng = rng

    def mover_at(self, depth: int) -> int:
        return self.player if depth % 2 == 0 else 1 - self.player

    def make_root(self, state: HighLevelState) -> _Node:
        return _Node(
            state, 0, None, enumerate_action_sets(state, self.player, self.catalog)
        )

    def expand(self, node: _Node) -> _Node:
        actions = node.untried.pop(self.rng.randrange(len(node.untried)))
        depth = node.depth + 1
        if node.pending is None:
            # first half of a simultaneous pair: same state, opponent to choose
            child = _Node(
                node.state, depth, actions,
                enumerate_action_sets(node.state, self.mover_at(depth), self.catalog),
            )
        else:
            searcher_set, opponent_set = node.pending, actions
            if self.player == 0:
                a_set, b_set = searcher_set, opponent_set
            else:
                a_set, b_set = opponent_set, searcher_set
            # sets come from the node's own legal-action enumeration
            nxt = step(
                node.state, a_set, b_set, self.resolver, self.catalog,
                validate=False,
            )
            untried = (
                []
                if _terminal(nxt)
                else enumerate_action_sets(nxt, self.mover_at(depth), self.catalog)
            )
            child = _Node(nxt, depth, None, untried)
        node.children.append(child)
        return child

    def select(self, node: _Node) -> _Node:
        if self.rng.random() < self.cfg.epsilon:
            return self.rng.choice(node.children)
        mover = self.mover_at(node.depth)
        best = node.children[0]
        best_mean = best.total / best.visits if best.visits else 0.0
        for child in node.children[1:]:
            mean = child.total / child.visits if child.visits else 0.0
            if (mover == self.player and mean > best_mean) or (
                mover != self.player and mean < best_mean
            ):
                best, best_mean = child, mean
        return best

    def rollout(self, node: _Node) -> float:
        state = node.state
        horizon = state.frame + self.cfg.playout_length
        pending = node.pending
        if pending is not None and not _terminal(state):
            # the searcher committed a half-move; the opponent answers randomly
            other_set = random_policy(state, 1 - self.player, self.catalog, self.rng)
            if self.player == 0:
                a_set, b_set = pending, other_set
            else:
                a_set, b_set = other_set, pending
            state = step(
                state, a_set, b_set, self.resolver, self.catalog, validate=False
            )
        while not _terminal(state) and state.frame < horizon:
            state = rollout_step(state, self.rng, self.resolver, self.catalog)
        return evaluate_state(state, self.player, self.catalog)

    def run(self, root: _Node, budget: int) -> None:
        for _ in range(budget):
            node = root
            path = [root]
            while (
                not node.untried
                and node.children
                and node.depth < self.cfg.max_tree_depth
                and not _terminal(node.state)
            ):
                node = self.select(node)
                path.append(node)
            if (
                node.untried
                and node.depth < self.cfg.max_tree_depth
                and not _terminal(node.state)
            ):
                node = self.expand(node)
                path.append(node)
            value = self.rollout(node)
            for visited in path:
                visited.visits += 1
                visited.total += value


def search_with_stats(
    root_state: HighLevelState,
    player: int,
    cfg: MctsConfig,
    resolver: CombatResolver,
    catalog: Catalog,
) -> tuple[dict[GroupKey, GroupAction], list[tuple[tuple, int]]]:
    """Run the configured budget; returns (chosen set, root visit counts)."""
    if cfg.playout_budget <= 0:
        raise ValidationError("playout budget must be > 0")
    if _terminal(root_state):
        return {}, []
    rng = random.Random(cfg.seed)
    searcher = _Search(player, cfg, resolver, catalog, rng)
    root = searcher.make_root(root_state)
    searcher.run(root, cfg.playout_budget)
    if not root.children:
        return {}, []
    best = max(root.children, key=lambda c: c.visits)
    distribution = [
        (canonical_action_set(c.pending), c.visits) for c in root.children
    ]
    return dict(best.pending), distribution


def search(
    root_state: HighLevelState,
    player: int,
    cfg: MctsConfig,
    resolver: CombatResolver,
    catalog: Catalog,
) -> dict[GroupKey, GroupAction]:
    """Most-visited root action set after the playout budget."""
    actions, _stats = search_with_stats(root_state, player, cfg, resolver, catalog)
    return actions


# ---------------------------------------------------------------------------
# Match runner


@dataclass(frozen=True)
class MatchResult:
    winner: str | None  # "a", "b", or None on timeout / mutual elimination
    final_eval: float  # from player a's perspective
    length: int
    cycles: int


@dataclass
class _Agent:
    kind: str
    player: int
    cfg: MctsConfig
    resolver: CombatResolver
    catalog: Catalog
    seed: int

    def __post_init__(self) -> None:
        if self.kind not in AGENT_KINDS:
            raise ValidationError(f"unknown agent kind {self.kind!r}")
        self._rng = random.Random(self.seed * 4 + self.player * 2 + 1)

    def act(self, state: HighLevelState, cycle: int):
        if self.kind == "scripted":
            return scripted_policy(state, self.player, self.catalog), []
        if self.kind == "random":
            return random_policy(state, self.player, self.catalog, self._rng), []
        cycle_cfg = MctsConfig(
            epsilon=self.cfg.epsilon,
            max_tree_depth=self.cfg.max_tree_depth,
            playout_length=self.cfg.playout_length,
            playout_budget=self.cfg.playout_budget,
            plan_interval=self.cfg.plan_interval,
            seed=self.seed * 1_000_003 + cycle * 97 + self.player,
        )
        return search_with_stats(
            state, self.player, cycle_cfg, self.resolver, self.catalog
        )


def play_match(
    graph: RegionGraph,
    scenario: list[tuple[int, Unit]],
    agent_a: str,
    agent_b: str,
    cfg: MctsConfig,
    resolver: CombatResolver,
    catalog: Catalog,
    variant: Variant = Variant.R_MA,
    max_frames: int = 28_800,
    seed: int = 0,
    log_fh=None,
) -> MatchResult:
    """One full game: agents re-plan every plan_interval frames.

    Between planning boundaries, groups whose actions complete default to
    idling; the game ends on elimination or at the frame limit.
    """
    state = abstract_from_units(scenario, graph, variant, catalog, frame=0)
    agents = {
        0: _Agent(agent_a, 0, cfg, resolver, catalog, seed),
        1: _Agent(agent_b, 1, cfg, resolver, catalog, seed),
    }
    cycle = 0
    while state.frame < max_frames and not _terminal(state):
        a_set, a_stats = agents[0].act(state, cycle)
        b_set, _b_stats = agents[1].act(state, cycle)
        if log_fh is not None:
            log_fh.write(json.dumps({
                "cycle": cycle,
                "frame": state.frame,
                "actions_a": [list(map(str, k)) + [v.action.value, v.target_region]
                              for k, v in a_set.items()],
                "actions_b": [list(map(str, k)) + [v.action.value, v.target_region]
                              for k, v in b_set.items()],
                "root_visits": [[str(key), visits] for key, visits in a_stats],
                "eval_a": evaluate_state(state, 0, catalog),
            }) + "\n")
        next_plan = (state.frame // cfg.plan_interval + 1) * cfg.plan_interval
        state = step(state, a_set, b_set, resolver, catalog)
        while state.frame < next_plan and not _terminal(state):
            state = step(
                state,
                idle_action_set(state, 0, catalog),
                idle_action_set(state, 1, catalog),
                resolver,
                catalog,
            )
        cycle += 1
    a_dead, b_dead = state.eliminated(0), state.eliminated(1)
    if b_dead and not a_dead:
        winner = "a"
    elif a_dead and not b_dead:
        winner = "b"
    else:
        winner = None
    return MatchResult(
        winner=winner,
        final_eval=evaluate_state(state, 0, catalog),
        length=min(state.frame, max_frames),
        cycles=cycle,
    )


@dataclass(frozen=True)
class MatchSummary:
    configuration: str
    games: int
    avg_eval: float
    win_pct: float
    loss_pct: float
    avg_length: float  # mean frames of games won

    def row(self) -> dict:
        return {
            "configuration": self.configuration,
            "games": self.games,
            "avg_eval": round(self.avg_eval, 4),
            "win_pct": round(self.win_pct, 2),
            "loss_pct": round(self.loss_pct, 2),
            "avg_length": round(self.avg_length, 1),
        }


def _match_job(args) -> MatchResult:
    (graph, scenario, agent_a, agent_b, cfg, spec, variant, max_frames,
     game_seed) = args
    return play_match(
        graph, scenario, agent_a, agent_b, cfg, spec.make_runner(),
        spec.catalog, variant=variant, max_frames=max_frames, seed=game_seed,
    )


def run_matches(
    graph: RegionGraph,
    scenario: list[tuple[int, Unit]],
    agent_a: str,
    agent_b: str,
    cfg: MctsConfig,
    resolver: CombatResolver,
    catalog: Catalog,
    games: int,
    variant: Variant = Variant.R_MA,
    max_frames: int = 28_800,
    seed: int = 0,
    log_path: str | Path | None = None,
    workers: int = 1,
    resolver_spec=None,
) -> tuple[list[MatchResult], MatchSummary]:
    """Play seeded games; game i runs with seed ``seed + i``.

    Games are independent, so with ``workers > 1`` they fan out across
    processes and merge deterministically by game index (requires
    ``resolver_spec``, a picklable ModelSpec-like object exposing
    ``make_runner`` and ``catalog``; per-cycle logging stays serial-only).
    """
    results: list[MatchResult] = []
    if workers > 1 and games > 1:
        if log_path is not None:
            raise ValidationError("match logs require a single worker")
        if resolver_spec is None:
            raise ValidationError("parallel matches need a picklable resolver spec")
        import multiprocessing

        jobs = [
            (graph, scenario, agent_a, agent_b, cfg, resolver_spec, variant,
             max_frames, seed + game)
            for game in range(games)
        ]
        with multiprocessing.Pool(workers) as pool:
            results = pool.map(_match_job, jobs)
    else:
        log_fh = open(log_path, "w") if log_path else None
        try:
            for game in range(games):
                results.append(play_match(
                    graph, scenario, agent_a, agent_b, cfg, resolver, catalog,
                    variant=variant, max_frames=max_frames, seed=seed + game,
                    log_fh=log_fh,
                ))
        finally:
            if log_fh:
                log_fh.close()
    wins = [r for r in results if r.winner == "a"]
    losses = [r for r in results if r.winner == "b"]
    summary = MatchSummary(
        configuration=f"{agent_a} vs {agent_b}",
        games=games,
        avg_eval=sum(r.final_eval for r in results) / games,
        win_pct=100.0 * len(wins) / games,
        loss_pct=100.0 * len(losses) / games,
        avg_length=(sum(r.length for r in wins) / len(wins)) if wins else 0.0,
    )
    return results, summary
