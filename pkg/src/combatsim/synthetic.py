"""Seeded synthetic combats, datasets, and traces via the tick oracle.

The oracle plays out randomly sampled combats and its kill schedule
becomes the ground truth, which makes these datasets suitable for
oracle-based experiments: learned parameters can be compared against
the generating ones and model predictions against the oracle outcome.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .core import DpfTable, static_dpf
from .dataset import CombatDataset, CombatRecord, EndReason, EventKind, TraceEvent
from .errors import ValidationError
from .models import CombatOutcome, Winner, tick_oracle_simulate
from .policies import TargetSelectionPolicy, destroy_score_policy
from .types import Catalog, CombatState, Unit

PROFILES = ("mixed", "homogeneous", "duels")


@dataclass(frozen=True)
class SyntheticConfig:
    n_combats: int
    seed: int
    profile: str = "mixed"
    targeting: str = "focus"
    max_units_per_side: int = 8
    max_frames: int = 20_000

    def __post_init__(self) -> None:
        if self.profile not in PROFILES:
            raise ValidationError(f"unknown profile {self.profile!r}")
        if self.n_combats <= 0:
            raise ValidationError("n_combats must be > 0")


def combat_pool(catalog: Catalog) -> list[int]:
    """Types eligible for synthetic armies: armed, mobile, not workers."""
    return [
        t.type_id
        for t in catalog.types
        if t.can_attack and not t.is_building and not t.is_worker
    ]


def _mutually_attackable(a_types: list[int], b_types: list[int], catalog: Catalog) -> bool:
    a_hits = any(
        catalog[i].can_attack_type(catalog[j]) for i in a_types for j in b_types
    )
    b_hits = any(
        catalog[j].can_attack_type(catalog[i]) for i in a_types for j in b_types
    )
    return a_hits and b_hits


def _fresh_unit(uid: int, type_id: int, catalog: Catalog) -> Unit:
    stats = catalog[type_id]
    return Unit(uid=uid, type_id=type_id, hp=stats.max_hp, shield=stats.max_shield)


def sample_combat_state(
    rng: random.Random, catalog: Catalog, cfg: SyntheticConfig
) -> CombatState:
    """One random mutually-attackable combat state at full health."""
    pool = combat_pool(catalog)
    if not pool:
        raise ValidationError("catalog has no combat-capable types")
    while True:
        if cfg.profile == "duels":
            # lopsided calibration duels: a large army grinds a small one
            i = rng.choice(pool)
            targets = [j for j in pool if catalog[i].can_attack_type(catalog[j])
                       and catalog[j].can_attack_type(catalog[i])]
            if not targets:
                continue
            j = rng.choice(targets)
            a_types = [i] * rng.randint(8, 12)
            b_types = [j] * rng.randint(2, 3)
        elif cfg.profile == "homogeneous":
            i, j = rng.choice(pool), rng.choice(pool)
            a_types = [i] * rng.randint(1, cfg.max_units_per_side)
            b_types = [j] * rng.randint(1, cfg.max_units_per_side)
        else:
            # armies are ground-cored: air types join as a weighted minority,
            # keeping compositions closer to the mixes real games produce
            def sample_types() -> list[int]:
                n_types = rng.choices((1, 2, 3), weights=(5, 4, 1))[0]
                remaining = list(pool)
                chosen: list[int] = []
                for _ in range(min(n_types, len(remaining))):
                    weights = [1 if catalog[t].is_flyer else 3 for t in remaining]
                    pick = rng.choices(remaining, weights=weights)[0]
                    chosen.append(pick)
                    remaining.remove(pick)
                return [rng.choice(chosen) for _ in range(rng.randint(1, cfg.max_units_per_side))]

            a_types = sample_types()
            b_types = sample_types()
        if not _mutually_attackable(a_types, b_types, catalog):
            continue
        army_a = tuple(_fresh_unit(i, t, catalog) for i, t in enumerate(sorted(a_types)))
        army_b = tuple(
            _fresh_unit(1000 + i, t, catalog) for i, t in enumerate(sorted(b_types))
        )
        return CombatState(army_a=army_a, army_b=army_b)


def _record_from_outcome(state: CombatState, out: CombatOutcome, catalog: Catalog) -> CombatRecord:
    enemy_of = {0: state.army_b, 1: state.army_a}
    passive = []
    for side, army in ((0, state.army_a), (1, state.army_b)):
        for u in army:
            stats = catalog[u.type_id]
            if not any(stats.can_attack_type(catalog[v.type_id]) for v in enemy_of[side]):
                passive.append(u.uid)
    if out.winner is Winner.STALEMATE:
        reason = EndReason.PEACE
        af, bf = out.survivors_a, out.survivors_b
    else:
        reason = EndReason.ARMY_DESTROYED
        af, bf = out.survivors_a, out.survivors_b
    return CombatRecord(
        t0=0,
        tf=int(math.ceil(out.duration_frames)),
        reason=reason,
        a0=state.army_a,
        b0=state.army_b,
        af=af,
        bf=bf,
        kills=tuple((int(f), uid) for f, uid in out.kills),
        passive=tuple(sorted(passive)),
    )


def generate_dataset(
    catalog: Catalog,
    cfg: SyntheticConfig,
    dpf_table: DpfTable | None = None,
    policy: TargetSelectionPolicy | None = None,
) -> CombatDataset:
    """Oracle-simulated random combats packaged as a combat dataset."""
    rng = random.Random(cfg.seed)
    table = dpf_table if dpf_table is not None else static_dpf(catalog)
    pol = policy if policy is not None else destroy_score_policy()
    records = []
    for _ in range(cfg.n_combats):
        state = sample_combat_state(rng, catalog, cfg)
        out = tick_oracle_simulate(
            state, table, pol, catalog, max_frames=cfg.max_frames, targeting=cfg.targeting
        )
        records.append(_record_from_outcome(state, out, catalog))
    return CombatDataset(
        records=tuple(records),
        catalog_ref=catalog.name,
        source=f"synthetic:{cfg.profile}:seed={cfg.seed}",
    )


def _combat_segment(
    state: CombatState,
    out: CombatOutcome,
    catalog: Catalog,
    base_frame: int,
    base_uid: int,
) -> list[TraceEvent]:
    """Events replaying one oracle combat inside its own frame/uid window."""
    events: list[TraceEvent] = []
    uid_map = {u.uid: base_uid + n for n, u in enumerate(state.all_units)}
    for side, army, y in ((0, state.army_a, 0.0), (1, state.army_b, 6.0)):
        for n, u in enumerate(army):
            events.append(TraceEvent(
                frame=base_frame,
                kind=EventKind.SPAWN,
                uid=uid_map[u.uid],
                player=side,
                type_id=u.type_id,
                pos=(n * 0.5, y),
            ))
    # every capable unit opens fire at frame +1
    enemy_of = {0: state.army_b, 1: state.army_a}
    capable: dict[int, list[Unit]] = {0: [], 1: []}
    for side, army in ((0, state.army_a), (1, state.army_b)):
        for u in army:
            stats = catalog[u.type_id]
            targets = [
                v for v in enemy_of[side]
                if stats.can_attack_type(catalog[v.type_id])
            ]
            if targets:
                capable[side].append(u)
                events.append(TraceEvent(
                    frame=base_frame + 1,
                    kind=EventKind.ORDER_ATTACK,
                    uid=uid_map[u.uid],
                    target_uid=uid_map[targets[0].uid],
                ))
    # kill schedule from the oracle: per frame, all damage lands before
    # any death (mirroring simultaneous application), and the losing
    # side's deaths go last so every simultaneous kill is recorded
    owner_of = {u.uid: 0 for u in state.army_a}
    owner_of.update({u.uid: 1 for u in state.army_b})
    health_of = {u.uid: u.health for u in state.all_units}
    death_frame = {uid: f for f, uid in out.kills}
    dealer_idx = 0
    loser = 0 if out.winner is Winner.B else 1
    by_frame: dict[int, list[int]] = {}
    for f, victim_uid in out.kills:
        by_frame.setdefault(int(f), []).append(victim_uid)
    for f in sorted(by_frame):
        frame = base_frame + 1 + f
        victims = sorted(by_frame[f], key=lambda uid: owner_of[uid] == loser)
        for victim_uid in victims:
            shooters = [
                u for u in capable[1 - owner_of[victim_uid]]
                if death_frame.get(u.uid, math.inf) >= f
            ]
            dealer = shooters[dealer_idx % len(shooters)]
            dealer_idx += 1
            events.append(TraceEvent(
                frame=frame,
                kind=EventKind.DAMAGE,
                uid=uid_map[dealer.uid],
                target_uid=uid_map[victim_uid],
                amount=health_of[victim_uid],
            ))
        for victim_uid in victims:
            events.append(TraceEvent(
                frame=frame, kind=EventKind.DEATH, uid=uid_map[victim_uid]
            ))
    # survivors' chip damage lands right after the first attack orders,
    # while every potential dealer is still alive
    end_frame = base_frame + 1 + int(math.ceil(out.duration_frames))
    for survivor in out.survivors_a + out.survivors_b:
        lost = health_of[survivor.uid] - survivor.health
        if lost > 1e-9:
            shooters = capable[1 - owner_of[survivor.uid]]
            if not shooters:
                continue
            dealer = shooters[dealer_idx % len(shooters)]
            dealer_idx += 1
            events.append(TraceEvent(
                frame=base_frame + 1,
                kind=EventKind.DAMAGE,
                uid=uid_map[dealer.uid],
                target_uid=uid_map[survivor.uid],
                amount=lost,
            ))
    # periodic order refreshes keep long grinds from closing as peace
    for t in range(100, int(out.duration_frames), 100):
        refresher = next(
            (
                u
                for side in (0, 1)
                for u in capable[side]
                if death_frame.get(u.uid, math.inf) > t
            ),
            None,
        )
        if refresher is None:
            break
        enemies_alive = [
            v for v in enemy_of[owner_of[refresher.uid]]
            if death_frame.get(v.uid, math.inf) > t
        ]
        if not enemies_alive:
            break
        events.append(TraceEvent(
            frame=base_frame + 1 + t,
            kind=EventKind.ORDER_ATTACK,
            uid=uid_map[refresher.uid],
            target_uid=uid_map[enemies_alive[0].uid],
        ))
    events.append(TraceEvent(frame=end_frame + 10, kind=EventKind.GAME_END))
    events.sort(key=lambda e: e.frame)
    return events


def _segment_detects_cleanly(
    segment: list[TraceEvent],
    state: CombatState,
    out: CombatOutcome,
    catalog: Catalog,
) -> bool:
    """True when detection reproduces the oracle combat as one clean record.

    Units outside the detector's two-hop in-range closure (a flyer nobody
    can shoot, say) legitimately fall out of the record; such samples are
    rejected rather than emitted as mismatching traces.
    """
    from .dataset import detect_combats  # local import: avoids cycle at module load

    try:
        records = detect_combats(segment, catalog)
    except Exception:
        return False
    if len(records) != 1:
        return False
    rec = records[0]
    return (
        rec.reason is EndReason.ARMY_DESTROYED
        and len(rec.a0) == len(state.army_a)
        and len(rec.b0) == len(state.army_b)
        and len(rec.kills) == len(out.kills)
    )


def generate_traces(
    catalog: Catalog,
    cfg: SyntheticConfig,
    dpf_table: DpfTable | None = None,
    policy: TargetSelectionPolicy | None = None,
) -> list[TraceEvent]:
    """Unit-event traces that replay oracle combats, for the detection pipeline.

    Each combat occupies its own frame window and uid range and ends with
    a game-end event; segments are only emitted when detection reproduces
    them as exactly one army-destroyed record.
    """
    rng = random.Random(cfg.seed)
    table = dpf_table if dpf_table is not None else static_dpf(catalog)
    pol = policy if policy is not None else destroy_score_policy()
    events: list[TraceEvent] = []
    base_frame = 0
    base_uid = 0
    for _ in range(cfg.n_combats):
        for _attempt in range(200):
            state = sample_combat_state(rng, catalog, cfg)
            min_range = min(
                r
                for u in state.all_units
                for r in (
                    catalog[u.type_id].range_ground,
                    catalog[u.type_id].range_air,
                )
                if r > 0
            )
            if min_range < 12:
                continue
            out = tick_oracle_simulate(
                state, table, pol, catalog, max_frames=cfg.max_frames,
                targeting=cfg.targeting,
            )
            if out.winner not in (Winner.A, Winner.B):
                continue
            segment = _combat_segment(state, out, catalog, base_frame, base_uid)
            if _segment_detects_cleanly(segment, state, out, catalog):
                break
        else:
            raise ValidationError("could not sample a cleanly detectable combat")
        events.extend(segment)
        base_frame = segment[-1].frame + 100
        base_uid += len(state.all_units)
    return events
