"""Abstract region-graph RTS game over unit groups.

The map is a graph of regions (optionally with chokepoints promoted to
regions); armies are groups of same-type units per region. Groups move
between adjacent regions, attack co-located enemies (resolved by a
pluggable combat model), or idle. States are immutable; ``step`` returns
the successor at the next action-completion boundary.
"""
from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Mapping

from .errors import ValidationError
from .models import CombatOutcome, Winner
from .types import Catalog, CombatState, Unit, unit_from_json

MAP_FORMAT_VERSION = 1
SCENARIO_FORMAT_VERSION = 1
IDLE_FRAMES = 400

CombatResolver = Callable[[CombatState], CombatOutcome]


class RegionKind(enum.Enum):
    REGION = "region"
    CHOKEPOINT = "chokepoint"


class Variant(enum.Enum):
    """State abstraction variants: chokepoint regions x building scope."""

    R_MB = "r-mb"    # regions only; military + bases
    R_MA = "r-ma"    # regions only; military + all buildings
    RC_MB = "rc-mb"  # with chokepoint regions; military + bases
    RC_MA = "rc-ma"  # with chokepoint regions; military + all buildings

    @property
    def with_chokepoints(self) -> bool:
        return self in (Variant.RC_MB, Variant.RC_MA)

    @property
    def all_buildings(self) -> bool:
        return self in (Variant.R_MA, Variant.RC_MA)


@dataclass(frozen=True)
class Region:
    region_id: int
    kind: RegionKind
    center: tuple[float, float]
    polygon: tuple[tuple[float, float], ...] | None = None


@dataclass(frozen=True)
class RegionGraph:
    regions: tuple[Region, ...]
    edges: frozenset[tuple[int, int]]  # stored as sorted pairs

    def __post_init__(self) -> None:
        ids = {r.region_id for r in self.regions}
        if len(ids) != len(self.regions):
            raise ValidationError("duplicate region ids")
        adjacency: dict[int, tuple[int, ...]] = {rid: () for rid in ids}
        for a, b in self.edges:
            if a not in ids or b not in ids:
                raise ValidationError(f"edge ({a}, {b}) references unknown region")
            adjacency[a] = adjacency[a] + (b,)
            adjacency[b] = adjacency[b] + (a,)
        adjacency = {rid: tuple(sorted(set(n))) for rid, n in adjacency.items()}
        object.__setattr__(self, "_adjacency", adjacency)
        by_id = {r.region_id: r for r in self.regions}
        object.__setattr__(self, "_by_id", by_id)
        distances = {
            (a, b): math.dist(by_id[a].center, by_id[b].center)
            for a, neighbors in adjacency.items()
            for b in neighbors
        }
        object.__setattr__(self, "_edge_dist", distances)
        if self.regions and not self._connected():
            raise ValidationError("region graph must be connected")

    def _connected(self) -> bool:
        start = self.regions[0].region_id
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = frontier.pop()
            for n in self.neighbors(nxt):
                if n not in seen:
                    seen.add(n)
                    frontier.append(n)
        return len(seen) == len(self.regions)

    def neighbors(self, region_id: int) -> tuple[int, ...]:
        return self._adjacency[region_id]

    def region(self, region_id: int) -> Region:
        try:
            return self._by_id[region_id]
        except KeyError:
            raise ValidationError(f"unknown region {region_id}") from None

    def region_of(self, pos: tuple[float, float]) -> int:
        """Region containing pos: polygon test first, else nearest center."""
        for r in self.regions:
            if r.polygon and _point_in_polygon(pos, r.polygon):
                return r.region_id
        return min(
            self.regions, key=lambda r: math.dist(pos, r.center)
        ).region_id

    def distance(self, a: int, b: int) -> float:
        cached = self._edge_dist.get((a, b))
        if cached is not None:
            return cached
        return math.dist(self.region(a).center, self.region(b).center)


def _point_in_polygon(pos: tuple[float, float], poly: tuple[tuple[float, float], ...]) -> bool:
    x, y = pos
    inside = False
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            cross = (x2 - x1) * (y - y1) / (y2 - y1) + x1
            if x < cross:
                inside = not inside
    return inside


def load_map(path: str | Path, variant: Variant) -> RegionGraph:
    with open(path) as fh:
        data = json.load(fh)
    return build_region_graph(data, variant)


def build_region_graph(data: dict, variant: Variant) -> RegionGraph:
    """Build the graph for a variant; chokepoints contract away under R-*."""
    if data.get("format_version") != MAP_FORMAT_VERSION:
        raise ValidationError(f"unsupported map format_version {data.get('format_version')!r}")
    regions = []
    for entry in data["regions"]:
        poly = entry.get("polygon")
        regions.append(Region(
            region_id=int(entry["region_id"]),
            kind=RegionKind(entry.get("kind", "region")),
            center=(float(entry["center"][0]), float(entry["center"][1])),
            polygon=tuple((float(x), float(y)) for x, y in poly) if poly else None,
        ))
    edges = {tuple(sorted((int(a), int(b)))) for a, b in data["edges"]}
    if variant.with_chokepoints:
        return RegionGraph(regions=tuple(regions), edges=frozenset(edges))
    # contract chokepoints: their neighbors become mutually adjacent
    chokes = {r.region_id for r in regions if r.kind is RegionKind.CHOKEPOINT}
    kept = tuple(r for r in regions if r.region_id not in chokes)
    adjacency: dict[int, set[int]] = {}
    for a, b in edges:
        adjacency.setdefault(a, set()).add(b)
        adjacency.setdefault(b, set()).add(a)
    new_edges: set[tuple[int, int]] = set()
    for a, b in edges:
        if a in chokes or b in chokes:
            continue
        new_edges.add((a, b))
    for choke in chokes:
        around = [n for n in adjacency.get(choke, ()) if n not in chokes]
        for i, a in enumerate(around):
            for b in around[i + 1:]:
                new_edges.add(tuple(sorted((a, b))))
    return RegionGraph(regions=kept, edges=frozenset(new_edges))


def load_scenario(path: str | Path) -> list[tuple[int, Unit]]:
    """Scenario file: initial unit placements as (player, unit) pairs."""
    with open(path) as fh:
        data = json.load(fh)
    if data.get("format_version") != SCENARIO_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported scenario format_version {data.get('format_version')!r}"
        )
    out = []
    for entry in data["units"]:
        player = int(entry["player"])
        if player not in (0, 1):
            raise ValidationError(f"bad player {player} in scenario")
        out.append((player, unit_from_json(entry)))
    return out


# ---------------------------------------------------------------------------
# Groups and state


class ActionType(enum.Enum):
    NA = "na"
    MOVE = "move"
    ATTACK = "attack"
    IDLE = "idle"


@dataclass(frozen=True, slots=True)
class GroupAction:
    action: ActionType
    target_region: int | None = None


GroupKey = tuple[int, int, int]  # (player, type_id, region_id)
PlayerActionSet = Mapping[GroupKey, GroupAction]


@dataclass(frozen=True, slots=True)
class Group:
    """Same-type units of one player inside one region."""

    player: int
    type_id: int
    size: int
    avg_hp: float  # mean health (hp + shield)
    region_id: int
    action: ActionType = ActionType.IDLE
    target_region: int | None = None
    end_frame: int = 0

    @property
    def key(self) -> GroupKey:
        return (self.player, self.type_id, self.region_id)


@dataclass(frozen=True)
class HighLevelState:
    frame: int
    graph: RegionGraph
    groups: tuple[Group, ...]
    variant: Variant

    def __post_init__(self) -> None:
        keys = [g.key for g in self.groups]
        if len(keys) != len(set(keys)):
            raise ValidationError("more than one group per (player, type, region)")
        mask = 0
        for g in self.groups:
            self.graph.region(g.region_id)
            if g.size < 1:
                raise ValidationError("group size must be >= 1")
            mask |= 1 << g.player
        object.__setattr__(self, "_players_mask", mask)

    def player_groups(self, player: int) -> tuple[Group, ...]:
        return tuple(g for g in self.groups if g.player == player)

    def eliminated(self, player: int) -> bool:
        return not self._players_mask & (1 << player)


def _successor_state(
    template: HighLevelState, frame: int, groups: tuple[Group, ...]
) -> HighLevelState:
    """Internal constructor for transitions that are correct by construction."""
    state = object.__new__(HighLevelState)
    object.__setattr__(state, "frame", frame)
    object.__setattr__(state, "graph", template.graph)
    object.__setattr__(state, "groups", groups)
    object.__setattr__(state, "variant", template.variant)
    mask = 0
    for g in groups:
        mask |= 1 << g.player
    object.__setattr__(state, "_players_mask", mask)
    return state


def abstract_from_units(
    units: list[tuple[int, Unit]],
    graph: RegionGraph,
    variant: Variant,
    catalog: Catalog,
    frame: int = 0,
) -> HighLevelState:
    """Group raw units by (player, type, region) under an abstraction variant.

    Workers are never included; buildings only when the variant says so
    (bases always). Units without a position land in the nearest region
    of their recorded position or region 0 if none.
    """
    buckets: dict[GroupKey, list[Unit]] = {}
    for player, unit in units:
        stats = catalog[unit.type_id]
        if stats.is_worker:
            continue
        if stats.is_building and not (stats.is_base or variant.all_buildings):
            continue
        if not stats.is_building and not stats.can_attack and not (
            stats.is_detector or stats.is_transport
        ):
            continue  # non-military oddities stay out of the abstraction
        region = graph.region_of(unit.pos) if unit.pos else graph.regions[0].region_id
        buckets.setdefault((player, unit.type_id, region), []).append(unit)
    groups = []
    for (player, type_id, region_id), members in sorted(buckets.items()):
        stats = catalog[type_id]
        avg_hp = sum(u.health for u in members) / len(members)
        groups.append(Group(
            player=player,
            type_id=type_id,
            size=len(members),
            avg_hp=avg_hp,
            region_id=region_id,
            action=ActionType.NA if stats.is_building else ActionType.IDLE,
            end_frame=frame,
        ))
    return HighLevelState(frame=frame, graph=graph, groups=tuple(groups), variant=variant)


# ---------------------------------------------------------------------------
# Legal actions


def is_orderable(group: Group, catalog: Catalog, frame: int) -> bool:
    """Buildings never take orders; moves and attacks lock until done.

    Idle is interruptible: a planner may override it at any boundary.
    """
    if catalog[group.type_id].is_building:
        return False
    if group.action in (ActionType.MOVE, ActionType.ATTACK) and group.end_frame > frame:
        return False
    return True


def group_options(state: HighLevelState, group: Group, catalog: Catalog) -> tuple[GroupAction, ...]:
    options = []
    if catalog[group.type_id].top_speed > 0:
        for dest in state.graph.neighbors(group.region_id):
            options.append(GroupAction(ActionType.MOVE, dest))
    if any(
        g.player != group.player and g.region_id == group.region_id
        for g in state.groups
    ):
        options.append(GroupAction(ActionType.ATTACK))
    options.append(GroupAction(ActionType.IDLE))
    return tuple(options)


def legal_actions(
    state: HighLevelState, player: int, catalog: Catalog
) -> list[tuple[Group, tuple[GroupAction, ...]]]:
    """Per-group choice lists; locked groups contribute their one action."""
    out = []
    for group in state.groups:
        if group.player != player:
            continue
        if catalog[group.type_id].is_building:
            out.append((group, (GroupAction(ActionType.NA),)))
        elif not is_orderable(group, catalog, state.frame):
            out.append((group, (GroupAction(group.action, group.target_region),)))
        else:
            out.append((group, group_options(state, group, catalog)))
    return out


def branching_factor(state: HighLevelState, player: int, catalog: Catalog) -> int:
    factor = 1
    for _group, options in legal_actions(state, player, catalog):
        factor *= len(options)
    return factor


def orderable_action_items(
    state: HighLevelState, player: int, catalog: Catalog
) -> list[tuple[Group, tuple[GroupAction, ...]]]:
    """Only the groups whose action is actually chosen this cycle."""
    return [
        (g, opts)
        for g, opts in legal_actions(state, player, catalog)
        if is_orderable(g, catalog, state.frame)
    ]


def enumerate_action_sets(
    state: HighLevelState, player: int, catalog: Catalog
) -> list[dict[GroupKey, GroupAction]]:
    """Cartesian product of per-group options (orderable groups only)."""
    items = orderable_action_items(state, player, catalog)
    sets: list[dict[GroupKey, GroupAction]] = [{}]
    for group, options in items:
        sets = [
            {**chosen, group.key: option}
            for chosen in sets
            for option in options
        ]
    return sets


def idle_action_set(
    state: HighLevelState, player: int, catalog: Catalog
) -> dict[GroupKey, GroupAction]:
    return {
        g.key: GroupAction(ActionType.IDLE)
        for g, _opts in orderable_action_items(state, player, catalog)
    }


def canonical_action_set(actions: PlayerActionSet) -> tuple:
    return tuple(sorted(
        (key, act.action.value, act.target_region)
        for key, act in actions.items()
    ))


# ---------------------------------------------------------------------------
# Stepping


def travel_frames(graph: RegionGraph, src: int, dst: int, speed: float) -> int:
    if speed <= 0:
        raise ValidationError("immobile type cannot move")
    return max(1, math.ceil(graph.distance(src, dst) / speed))


def _expand_group(group: Group, catalog: Catalog, uid_base: int) -> list[Unit]:
    stats = catalog[group.type_id]
    units = []
    for i in range(group.size):
        h = group.avg_hp
        hp = min(h, stats.max_hp)
        shield = max(0.0, h - hp)
        units.append(Unit(uid=uid_base + i, type_id=group.type_id, hp=hp, shield=shield))
    return units


def _regroup(
    player: int, units: list[Unit], region_id: int, action: ActionType,
    end_frame: int,
) -> list[Group]:
    by_type: dict[int, list[Unit]] = {}
    for u in units:
        by_type.setdefault(u.type_id, []).append(u)
    groups = []
    for type_id, members in sorted(by_type.items()):
        groups.append(Group(
            player=player,
            type_id=type_id,
            size=len(members),
            avg_hp=sum(u.health for u in members) / len(members),
            region_id=region_id,
            action=action,
            end_frame=end_frame,
        ))
    return groups


def _classify(
    units: list[Unit], enemies: list[Unit], catalog: Catalog
) -> tuple[list[Unit], list[Unit]]:
    """Split into (fighting, removed): harmless or invincible units sit out."""
    fighting, removed = [], []
    enemy_types = {u.type_id for u in enemies}
    for u in units:
        stats = catalog[u.type_id]
        harmless = not any(
            stats.can_attack_type(catalog[t]) for t in enemy_types
        )
        invincible = not any(
            catalog[t].can_attack_type(stats) for t in enemy_types
        )
        if harmless or invincible:
            removed.append(u)
        else:
            fighting.append(u)
    return fighting, removed


def _resolve_region_combat(
    region_id: int,
    participants: list[Group],
    resolver: CombatResolver,
    catalog: Catalog,
    frame: int,
) -> tuple[list[Group], int] | None:
    """Two-phase combat among every co-located group; None when nothing fights.

    Phase one pits the mutually-engageable units against each other; the
    winner then grinds through the loser's damageable bystanders so the
    duration accounts for them. Returns the surviving groups (all busy
    for the combat's duration) and the duration in frames.
    """
    a_units: list[Unit] = []
    b_units: list[Unit] = []
    uid = 0
    for group in participants:
        expanded = _expand_group(group, catalog, uid)
        uid += group.size
        (a_units if group.player == 0 else b_units).extend(expanded)
    if not a_units or not b_units:
        return None
    a_fight, _a_out = _classify(a_units, b_units, catalog)
    b_fight, _b_out = _classify(b_units, a_units, catalog)
    alive: dict[int, dict[int, Unit]] = {
        0: {u.uid: u for u in a_units},
        1: {u.uid: u for u in b_units},
    }

    duration = 0.0
    fought = False
    winner_side: int | None = None
    if a_fight and b_fight:
        outcome = resolver(CombatState(army_a=tuple(a_fight), army_b=tuple(b_fight)))
        if outcome.winner is Winner.STALEMATE:
            return None  # nobody can make progress; the attack fizzles
        fought = True
        duration = outcome.duration_frames
        for side, fighters, survivors in (
            (0, a_fight, outcome.survivors_a),
            (1, b_fight, outcome.survivors_b),
        ):
            for u in fighters:
                del alive[side][u.uid]
            for u in survivors:
                alive[side][u.uid] = u
        if outcome.winner is Winner.A:
            winner_side = 0
        elif outcome.winner is Winner.B:
            winner_side = 1
    else:
        # no mutual engagement at all (harmless/invincible filtering emptied
        # one or both sides): the side that can still hurt the other, if
        # exactly one can, wins by default and proceeds to phase two
        def can_hurt(side: int) -> bool:
            return any(
                catalog.can_attack_unit(u, v)
                for u in alive[side].values()
                for v in alive[1 - side].values()
            )

        a_can, b_can = can_hurt(0), can_hurt(1)
        if a_can and not b_can:
            winner_side = 0
        elif b_can and not a_can:
            winner_side = 1

    if winner_side is not None:
        loser = 1 - winner_side
        killable = [
            v for v in alive[loser].values()
            if any(catalog.can_attack_unit(u, v) for u in alive[winner_side].values())
        ]
        executors = [
            u for u in alive[winner_side].values()
            if any(catalog.can_attack_unit(u, v) for v in killable)
        ]
        if killable and executors:
            phase2 = resolver(
                CombatState(
                    army_a=tuple(sorted(executors, key=lambda u: u.uid)),
                    army_b=tuple(sorted(killable, key=lambda u: u.uid)),
                )
            )
            fought = True
            duration += phase2.duration_frames
            for u in killable:
                del alive[loser][u.uid]
            for u in phase2.survivors_b:
                alive[loser][u.uid] = u
            for u in executors:
                del alive[winner_side][u.uid]
            for u in phase2.survivors_a:
                alive[winner_side][u.uid] = u

    if not fought:
        return None

    busy_until = frame + max(1, math.ceil(duration))
    survivors_groups: list[Group] = []
    survivors_groups += _regroup(
        0, list(alive[0].values()), region_id, ActionType.ATTACK, busy_until
    )
    survivors_groups += _regroup(
        1, list(alive[1].values()), region_id, ActionType.ATTACK, busy_until
    )
    return survivors_groups, busy_until


def _advance(
    state: HighLevelState,
    groups: dict[GroupKey, Group],
    attack_regions: set[int],
    resolver: CombatResolver,
    catalog: Catalog,
) -> HighLevelState:
    """Shared tail of a step: resolve combats, jump to the boundary, merge."""
    frame = state.frame
    for region_id in sorted(attack_regions):
        participants = [g for g in groups.values() if g.region_id == region_id]
        result = _resolve_region_combat(
            region_id, sorted(participants, key=lambda g: g.key),
            resolver, catalog, frame,
        )
        if result is None:
            # the attack fizzled: attackers take a beat instead of spinning
            for g in participants:
                if g.action is ActionType.ATTACK and g.end_frame <= frame:
                    groups[g.key] = replace(g, end_frame=frame + 1)
            continue
        survivors, _busy_until = result
        for g in participants:
            del groups[g.key]
        for g in survivors:
            groups[g.key] = g

    # advance to the next completion boundary
    boundary = None
    for g in groups.values():
        if g.action is not ActionType.NA and g.end_frame > frame:
            if boundary is None or g.end_frame < boundary:
                boundary = g.end_frame
    if boundary is None:
        boundary = frame + IDLE_FRAMES

    # complete everything due at the boundary; arrivals merge into the
    # same-(player, type, region) group with size-weighted mean health
    merged: dict[GroupKey, Group] = {}
    for g in sorted(groups.values(), key=lambda g: g.key):
        action = g.action
        if action is ActionType.MOVE and g.end_frame <= boundary:
            g = Group(g.player, g.type_id, g.size, g.avg_hp, g.target_region,
                      ActionType.IDLE, None, boundary)
        elif (
            action is not ActionType.NA
            and action is not ActionType.MOVE
            and g.end_frame <= boundary
        ):
            g = Group(g.player, g.type_id, g.size, g.avg_hp, g.region_id,
                      ActionType.IDLE, None, boundary)
        key = g.key
        other = merged.get(key)
        if other is None:
            merged[key] = g
        else:
            total = other.size + g.size
            merged[key] = Group(
                g.player, g.type_id, total,
                (other.avg_hp * other.size + g.avg_hp * g.size) / total,
                g.region_id, ActionType.IDLE, None, boundary,
            )
    return _successor_state(
        state, boundary, tuple(sorted(merged.values(), key=lambda g: g.key))
    )


def step(
    state: HighLevelState,
    actions_a: PlayerActionSet,
    actions_b: PlayerActionSet,
    resolver: CombatResolver,
    catalog: Catalog,
    validate: bool = True,
) -> HighLevelState:
    """Apply both players' orders and advance to the next completion boundary.

    Every orderable group needs exactly one legal action. Attacks resolve
    immediately (all co-located groups of both players fight) and lock the
    survivors for the combat's duration; moves relocate on arrival and
    merge into same-type groups; idle expires after 400 frames.

    ``validate=False`` skips legality checks; callers (tree search) must
    supply sets built from the state's own legal actions.
    """
    frame = state.frame
    groups: dict[GroupKey, Group] = {g.key: g for g in state.groups}
    attack_regions: set[int] = set()
    for player, actions in ((0, actions_a), (1, actions_b)):
        if validate:
            orderable = {
                g.key: (g, opts)
                for g, opts in orderable_action_items(state, player, catalog)
            }
            for key in actions:
                if key not in orderable:
                    raise ValidationError(f"group {key} is not orderable")
            for key, (_group, options) in orderable.items():
                act = actions.get(key)
                if act is None:
                    raise ValidationError(f"group {key} was given no action")
                if act not in options:
                    raise ValidationError(f"illegal action {act} for group {key}")
        for key, act in actions.items():
            group = groups[key]
            if act.action is ActionType.MOVE:
                speed = catalog[group.type_id].top_speed
                arrival = frame + travel_frames(
                    state.graph, group.region_id, act.target_region, speed
                )
                groups[key] = Group(
                    group.player, group.type_id, group.size, group.avg_hp,
                    group.region_id, ActionType.MOVE, act.target_region, arrival,
                )
            elif act.action is ActionType.IDLE:
                groups[key] = Group(
                    group.player, group.type_id, group.size, group.avg_hp,
                    group.region_id, ActionType.IDLE, None, frame + IDLE_FRAMES,
                )
            else:
                groups[key] = Group(
                    group.player, group.type_id, group.size, group.avg_hp,
                    group.region_id, ActionType.ATTACK, None, group.end_frame,
                )
                attack_regions.add(group.region_id)
    return _advance(state, groups, attack_regions, resolver, catalog)


def rollout_step(
    state: HighLevelState,
    rng: random.Random,
    resolver: CombatResolver,
    catalog: Catalog,
) -> HighLevelState:
    """Fast path for playouts: both players act uniformly at random.

    Behaviorally identical to ``step`` fed by ``random_policy`` for both
    players with the same generator (groups are visited in the same
    order, so the random draws coincide).
    """
    frame = state.frame
    graph = state.graph
    types = catalog.types
    players_in_region: dict[int, int] = {}
    for g in state.groups:
        players_in_region[g.region_id] = players_in_region.get(g.region_id, 0) | (
            1 << g.player
        )
    groups: dict[GroupKey, Group] = {}
    attack_regions: set[int] = set()
    for g in state.groups:
        stats = types[g.type_id]
        if stats.is_building or (
            g.action in (ActionType.MOVE, ActionType.ATTACK) and g.end_frame > frame
        ):
            groups[g.key] = g
            continue
        options: list[tuple[ActionType, int | None]] = []
        if stats.top_speed > 0:
            for dest in graph.neighbors(g.region_id):
                options.append((ActionType.MOVE, dest))
        if players_in_region[g.region_id] & (1 << (1 - g.player)):
            options.append((ActionType.ATTACK, None))
        options.append((ActionType.IDLE, None))
        action, target = options[rng.randrange(len(options))]
        if action is ActionType.MOVE:
            arrival = frame + max(
                1, math.ceil(graph.distance(g.region_id, target) / stats.top_speed)
            )
            groups[g.key] = Group(
                g.player, g.type_id, g.size, g.avg_hp, g.region_id,
                ActionType.MOVE, target, arrival,
            )
        elif action is ActionType.IDLE:
            groups[g.key] = Group(
                g.player, g.type_id, g.size, g.avg_hp, g.region_id,
                ActionType.IDLE, None, frame + IDLE_FRAMES,
            )
        else:
            groups[g.key] = Group(
                g.player, g.type_id, g.size, g.avg_hp, g.region_id,
                ActionType.ATTACK, None, g.end_frame,
            )
            attack_regions.add(g.region_id)
    return _advance(state, groups, attack_regions, resolver, catalog)


# ---------------------------------------------------------------------------
# Baseline policies


def random_policy(
    state: HighLevelState, player: int, catalog: Catalog, rng: random.Random
) -> dict[GroupKey, GroupAction]:
    """Uniform choice per orderable group."""
    return {
        g.key: rng.choice(opts)
        for g, opts in orderable_action_items(state, player, catalog)
    }


def _bfs_next_hop(graph: RegionGraph, src: int, targets: set[int]) -> int | None:
    """First hop of a shortest path from src to the nearest target region."""
    if src in targets:
        return None
    parent: dict[int, int] = {src: src}
    frontier = [src]
    while frontier:
        nxt = []
        for rid in frontier:
            for n in sorted(graph.neighbors(rid)):
                if n in parent:
                    continue
                parent[n] = rid
                if n in targets:
                    hop = n
                    while parent[hop] != src:
                        hop = parent[hop]
                    return hop
                nxt.append(n)
        frontier = nxt
    return None


def scripted_policy(
    state: HighLevelState, player: int, catalog: Catalog
) -> dict[GroupKey, GroupAction]:
    """Advance toward the nearest enemy-occupied region; attack on contact."""
    enemy_regions = {g.region_id for g in state.groups if g.player != player}
    actions: dict[GroupKey, GroupAction] = {}
    for group, options in orderable_action_items(state, player, catalog):
        if group.region_id in enemy_regions:
            attack = GroupAction(ActionType.ATTACK)
            actions[group.key] = attack if attack in options else GroupAction(ActionType.IDLE)
            continue
        hop = _bfs_next_hop(state.graph, group.region_id, enemy_regions) if enemy_regions else None
        if hop is not None and GroupAction(ActionType.MOVE, hop) in options:
            actions[group.key] = GroupAction(ActionType.MOVE, hop)
        else:
            actions[group.key] = GroupAction(ActionType.IDLE)
    return actions
