import random

import pytest

from combatsim.core import static_dpf
from combatsim.errors import ValidationError
from combatsim.evaluation import ModelSpec
from combatsim.hlgame import (
    ActionType,
    Group,
    GroupAction,
    HighLevelState,
    Region,
    RegionGraph,
    RegionKind,
    Variant,
    abstract_from_units,
    branching_factor,
    build_region_graph,
    enumerate_action_sets,
    idle_action_set,
    legal_actions,
    random_policy,
    scripted_policy,
    step,
    travel_frames,
)
from combatsim.policies import destroy_score_policy
from combatsim.types import Unit

from helpers import mk_unit


def line_graph(n=3, spacing=400.0):
    regions = tuple(
        Region(region_id=i + 1, kind=RegionKind.REGION, center=(i * spacing, 0.0))
        for i in range(n)
    )
    edges = frozenset((i + 1, i + 2) for i in range(n - 1))
    return RegionGraph(regions=regions, edges=edges)


def resolver_for(catalog):
    return ModelSpec(
        kind="decreasing",
        dpf_table=static_dpf(catalog),
        policy=destroy_score_policy(),
        catalog=catalog,
    ).make_runner()


def group(player, type_id, size, avg_hp, region, action=ActionType.IDLE, end=0):
    return Group(player=player, type_id=type_id, size=size, avg_hp=avg_hp,
                 region_id=region, action=action, end_frame=end)


def branching_fixture_state(catalog, graph=None):
    """Base in region 1, tanks in region 2, vultures in region 3."""
    graph = graph or line_graph(3)
    groups = (
        group(0, 6, 1, 1500.0, 1, action=ActionType.NA),  # hq
        group(0, 4, 2, 150.0, 2),                         # tanks
        group(0, 2, 4, 60.0, 3),                          # raptors
    )
    return HighLevelState(frame=0, graph=graph, groups=groups, variant=Variant.RC_MB)


def test_branching_factor_fixture_is_six(catalog):
    state = branching_fixture_state(catalog)
    # (base: 1) x (tanks: 2 moves + idle) x (raptors: 1 move + idle) = 6
    assert branching_factor(state, 0, catalog) == 6
    assert len(enumerate_action_sets(state, 0, catalog)) == 6


def test_branching_factor_lonely_group(catalog):
    graph = RegionGraph(
        regions=(Region(region_id=1, kind=RegionKind.REGION, center=(0, 0)),),
        edges=frozenset(),
    )
    state = HighLevelState(
        frame=0, graph=graph, groups=(group(0, 0, 3, 40.0, 1),),
        variant=Variant.R_MB,
    )
    assert branching_factor(state, 0, catalog) == 1  # idle only
    sets = enumerate_action_sets(state, 0, catalog)
    assert sets == [{(0, 0, 1): GroupAction(ActionType.IDLE)}]


def test_co_located_enemy_adds_attack(catalog):
    graph = line_graph(2)
    state = HighLevelState(
        frame=0, graph=graph,
        groups=(group(0, 0, 3, 40.0, 1), group(1, 0, 2, 40.0, 1)),
        variant=Variant.R_MB,
    )
    # move + idle + attack = 3 options
    assert branching_factor(state, 0, catalog) == 3


def test_mid_move_group_is_locked(catalog):
    graph = line_graph(3)
    state = HighLevelState(
        frame=10, graph=graph,
        groups=(group(0, 0, 3, 40.0, 2, action=ActionType.MOVE, end=90),),
        variant=Variant.R_MB,
    )
    actions = legal_actions(state, 0, catalog)
    assert len(actions) == 1
    _g, options = actions[0]
    assert len(options) == 1
    assert options[0].action is ActionType.MOVE
    assert branching_factor(state, 0, catalog) == 1


def test_abstract_from_units_groups_and_filters(catalog):
    graph = line_graph(3)
    units = [
        (0, mk_unit(1, 2, 60, pos=(810.0, 0.0))),   # raptor, region 3
        (0, mk_unit(2, 2, 50, pos=(805.0, 0.0))),
        (0, mk_unit(3, 7, 60, pos=(800.0, 0.0))),   # worker: excluded
        (0, mk_unit(4, 6, 1500, pos=(0.0, 0.0))),   # hq: kept (base)
        (0, mk_unit(5, 5, 200, pos=(5.0, 0.0))),    # pillbox: MB excludes
        (1, mk_unit(6, 0, 40, pos=(400.0, 0.0))),
    ]
    state = abstract_from_units(units, graph, Variant.R_MB, catalog)
    keys = {g.key for g in state.groups}
    assert (0, 2, 3) in keys
    assert (0, 6, 1) in keys
    assert (1, 0, 2) in keys
    assert not any(g.type_id in (5, 7) for g in state.groups)
    raptor_group = next(g for g in state.groups if g.key == (0, 2, 3))
    assert raptor_group.size == 2
    assert raptor_group.avg_hp == pytest.approx(55.0)
    state_ma = abstract_from_units(units, graph, Variant.R_MA, catalog)
    assert any(g.type_id == 5 for g in state_ma.groups)


def test_grouping_round_trip(catalog):
    # expand groups to units, re-abstract: identical group multiset
    graph = line_graph(3)
    state = branching_fixture_state(catalog, graph)
    units = []
    uid = 0
    for g in state.groups:
        for _ in range(g.size):
            stats = catalog[g.type_id]
            hp = min(g.avg_hp, stats.max_hp)
            shield = max(0.0, g.avg_hp - hp)
            units.append((g.player, Unit(
                uid=uid, type_id=g.type_id, hp=hp, shield=shield,
                pos=graph.region(g.region_id).center,
            )))
            uid += 1
    rebuilt = abstract_from_units(units, graph, state.variant, catalog)
    original = {(g.key, g.size, round(g.avg_hp, 9)) for g in state.groups}
    recovered = {(g.key, g.size, round(g.avg_hp, 9)) for g in rebuilt.groups}
    assert original == recovered


def test_chokepoint_contraction():
    data = {
        "format_version": 1,
        "regions": [
            {"region_id": 1, "kind": "region", "center": [0, 0]},
            {"region_id": 2, "kind": "chokepoint", "center": [200, 0]},
            {"region_id": 3, "kind": "region", "center": [400, 0]},
        ],
        "edges": [[1, 2], [2, 3]],
    }
    rc = build_region_graph(data, Variant.RC_MB)
    assert len(rc.regions) == 3
    assert rc.neighbors(2) == (1, 3)
    r = build_region_graph(data, Variant.R_MB)
    assert len(r.regions) == 2
    assert r.neighbors(1) == (3,)


def test_region_of_polygon_and_nearest():
    graph = RegionGraph(
        regions=(
            Region(1, RegionKind.REGION, (0.0, 0.0),
                   polygon=((-10.0, -10.0), (10.0, -10.0), (10.0, 10.0), (-10.0, 10.0))),
            Region(2, RegionKind.REGION, (100.0, 0.0)),
        ),
        edges=frozenset({(1, 2)}),
    )
    assert graph.region_of((5.0, 5.0)) == 1
    assert graph.region_of((80.0, 0.0)) == 2  # nearest center fallback


def test_disconnected_graph_rejected():
    with pytest.raises(ValidationError):
        RegionGraph(
            regions=(
                Region(1, RegionKind.REGION, (0.0, 0.0)),
                Region(2, RegionKind.REGION, (100.0, 0.0)),
            ),
            edges=frozenset(),
        )


# ---------------------------------------------------------------------------
# Stepping


def test_step_idle_advances_frame_only(catalog):
    graph = line_graph(3)
    state = HighLevelState(
        frame=0, graph=graph,
        groups=(group(0, 0, 3, 40.0, 1), group(1, 0, 3, 40.0, 3)),
        variant=Variant.R_MB,
    )
    nxt = step(
        state,
        idle_action_set(state, 0, catalog),
        idle_action_set(state, 1, catalog),
        resolver_for(catalog),
        catalog,
    )
    assert nxt.frame == 400
    assert {g.key for g in nxt.groups} == {g.key for g in state.groups}
    assert all(g.avg_hp == 40.0 for g in nxt.groups)


def test_step_move_relocates_and_merges(catalog):
    graph = line_graph(3, spacing=400.0)
    state = HighLevelState(
        frame=0, graph=graph,
        groups=(group(0, 0, 2, 40.0, 1), group(0, 0, 3, 20.0, 2)),
        variant=Variant.R_MB,
    )
    actions = {
        (0, 0, 1): GroupAction(ActionType.MOVE, 2),
        (0, 0, 2): GroupAction(ActionType.IDLE),
    }
    nxt = step(state, actions, {}, resolver_for(catalog), catalog)
    # grunt speed 4: 400px / 4 = 100 frames; movers arrive first
    assert nxt.frame == 100
    merged = [g for g in nxt.groups if g.key == (0, 0, 2)]
    assert len(merged) == 1 and len(nxt.groups) == 1
    assert merged[0].size == 5
    assert merged[0].avg_hp == pytest.approx((2 * 40.0 + 3 * 20.0) / 5)


def test_step_requires_action_for_every_orderable_group(catalog):
    graph = line_graph(2)
    state = HighLevelState(
        frame=0, graph=graph, groups=(group(0, 0, 1, 40.0, 1),),
        variant=Variant.R_MB,
    )
    with pytest.raises(ValidationError):
        step(state, {}, {}, resolver_for(catalog), catalog)
    with pytest.raises(ValidationError, match="illegal action"):
        step(
            state,
            {(0, 0, 1): GroupAction(ActionType.MOVE, 99)},
            {},
            resolver_for(catalog),
            catalog,
        )


def test_step_attack_resolves_combat(catalog):
    graph = line_graph(2)
    state = HighLevelState(
        frame=0, graph=graph,
        groups=(group(0, 0, 6, 40.0, 1), group(1, 0, 2, 40.0, 1)),
        variant=Variant.R_MB,
    )
    actions_a = {(0, 0, 1): GroupAction(ActionType.ATTACK)}
    actions_b = idle_action_set(state, 1, catalog)
    nxt = step(state, actions_a, actions_b, resolver_for(catalog), catalog)
    players = {g.player for g in nxt.groups}
    assert players == {0}
    winner = nxt.groups[0]
    assert winner.size >= 5  # 6v2 grunts: at most one casualty
    assert nxt.eliminated(1)


def test_step_mirror_attack_draws_both_removed(catalog):
    graph = line_graph(2)
    state = HighLevelState(
        frame=0, graph=graph,
        groups=(group(0, 0, 3, 40.0, 1), group(1, 0, 3, 40.0, 1)),
        variant=Variant.R_MB,
    )
    actions_a = {(0, 0, 1): GroupAction(ActionType.ATTACK)}
    actions_b = {(1, 0, 1): GroupAction(ActionType.ATTACK)}
    nxt = step(state, actions_a, actions_b, resolver_for(catalog), catalog)
    assert nxt.groups == ()


def test_step_harmless_building_destroyed_phase_two(catalog):
    graph = line_graph(2)
    state = HighLevelState(
        frame=0, graph=graph,
        groups=(group(0, 0, 4, 40.0, 1), group(1, 6, 1, 1500.0, 1, action=ActionType.NA)),
        variant=Variant.R_MA,
    )
    actions_a = {(0, 0, 1): GroupAction(ActionType.ATTACK)}
    nxt = step(state, actions_a, {}, resolver_for(catalog), catalog)
    assert nxt.eliminated(1)
    attacker = next(g for g in nxt.groups if g.player == 0)
    assert attacker.size == 4 and attacker.avg_hp == 40.0
    # duration comes from the phase-two grind: 1500 hp / (4 * 0.4 dpf)
    # rounded to the busy boundary
    assert nxt.frame == pytest.approx(938, abs=1)


def test_step_invincible_flyer_survives(catalog):
    # raptors (flyers) attack grunts who cannot shoot back upward
    graph = line_graph(2)
    state = HighLevelState(
        frame=0, graph=graph,
        groups=(group(0, 2, 2, 60.0, 1), group(1, 0, 3, 40.0, 1)),
        variant=Variant.R_MB,
    )
    actions_a = {(0, 2, 1): GroupAction(ActionType.ATTACK)}
    actions_b = idle_action_set(state, 1, catalog)
    nxt = step(state, actions_a, actions_b, resolver_for(catalog), catalog)
    assert nxt.eliminated(1)
    raptors = next(g for g in nxt.groups if g.player == 0)
    assert raptors.size == 2 and raptors.avg_hp == 60.0


def test_step_determinism(catalog):
    graph = line_graph(3)
    state = HighLevelState(
        frame=0, graph=graph,
        groups=(group(0, 0, 4, 40.0, 1), group(1, 4, 2, 150.0, 3)),
        variant=Variant.R_MB,
    )
    rng1, rng2 = random.Random(5), random.Random(5)
    a1 = random_policy(state, 0, catalog, rng1)
    a2 = random_policy(state, 0, catalog, rng2)
    assert a1 == a2
    nxt1 = step(state, a1, idle_action_set(state, 1, catalog), resolver_for(catalog), catalog)
    nxt2 = step(state, a2, idle_action_set(state, 1, catalog), resolver_for(catalog), catalog)
    assert nxt1 == nxt2


def test_step_sizes_never_increase(catalog):
    rng = random.Random(7)
    graph = line_graph(3)
    state = HighLevelState(
        frame=0, graph=graph,
        groups=(
            group(0, 0, 4, 40.0, 1), group(0, 4, 2, 150.0, 2),
            group(1, 0, 4, 40.0, 3), group(1, 2, 2, 60.0, 2),
        ),
        variant=Variant.R_MB,
    )
    resolver = resolver_for(catalog)
    totals = {0: 6, 1: 6}
    for _ in range(20):
        if state.eliminated(0) or state.eliminated(1):
            break
        a = random_policy(state, 0, catalog, rng)
        b = random_policy(state, 1, catalog, rng)
        state = step(state, a, b, resolver, catalog)
        for player in (0, 1):
            new_total = sum(g.size for g in state.player_groups(player))
            assert new_total <= totals[player]
            totals[player] = new_total


def test_scripted_policy_moves_toward_enemy(catalog):
    graph = line_graph(3)
    state = HighLevelState(
        frame=0, graph=graph,
        groups=(group(0, 0, 3, 40.0, 1), group(1, 0, 3, 40.0, 3)),
        variant=Variant.R_MB,
    )
    actions = scripted_policy(state, 0, catalog)
    assert actions[(0, 0, 1)] == GroupAction(ActionType.MOVE, 2)
    # co-located: attack
    state2 = HighLevelState(
        frame=0, graph=graph,
        groups=(group(0, 0, 3, 40.0, 2), group(1, 0, 3, 40.0, 2)),
        variant=Variant.R_MB,
    )
    assert scripted_policy(state2, 0, catalog)[(0, 0, 2)] == GroupAction(ActionType.ATTACK)
    # no enemies anywhere: idle
    state3 = HighLevelState(
        frame=0, graph=graph, groups=(group(0, 0, 3, 40.0, 2),),
        variant=Variant.R_MB,
    )
    assert scripted_policy(state3, 0, catalog)[(0, 0, 2)] == GroupAction(ActionType.IDLE)


def test_travel_frames_rounding():
    graph = line_graph(2, spacing=401.0)
    assert travel_frames(graph, 1, 2, 4.0) == 101
    with pytest.raises(ValidationError):
        travel_frames(graph, 1, 2, 0.0)


def test_rollout_step_matches_step_with_random_policy(catalog):
    # the fused playout path must consume the generator identically and
    # produce the same successor as step() fed by random_policy twice
    from combatsim.hlgame import rollout_step

    graph = line_graph(3)
    resolver = resolver_for(catalog)
    for seed in range(30):
        state = HighLevelState(
            frame=0, graph=graph,
            groups=(
                group(0, 0, 4, 40.0, 1), group(0, 4, 2, 150.0, 2),
                group(1, 0, 4, 40.0, 3), group(1, 2, 2, 60.0, 2),
                group(1, 6, 1, 1500.0, 3, action=ActionType.NA),
            ),
            variant=Variant.R_MA,
        )
        rng_a, rng_b = random.Random(seed), random.Random(seed)
        for _ in range(6):
            if state.eliminated(0) or state.eliminated(1):
                break
            via_policy = step(
                state,
                random_policy(state, 0, catalog, rng_a),
                random_policy(state, 1, catalog, rng_a),
                resolver, catalog,
            )
            via_rollout = rollout_step(state, rng_b, resolver, catalog)
            assert via_policy == via_rollout
            state = via_rollout
