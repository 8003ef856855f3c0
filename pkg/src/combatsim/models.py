"""Combat forward models: map an initial combat state to a predicted end state.

Four simulators share one contract: ``(state, dpf params, policy) ->
CombatOutcome``. Three are closed-form or event-driven (lanchester,
sustained, decreasing); the tick oracle is a brute-force 1-frame
discretization used as an independent reference and as the generator
for synthetic datasets.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import DpfTable
from .errors import ValidationError
from .policies import TargetSelectionPolicy
from .types import Catalog, CombatState, Unit

log = logging.getLogger(__name__)

# Kill-time comparisons are exact in the underlying algorithms; floats need
# a relative tolerance to recognise simultaneous kills.
DRAW_REL_TOL = 1e-9


class Winner(enum.Enum):
    A = "a"
    B = "b"
    DRAW = "draw"
    STALEMATE = "stalemate"


@dataclass(frozen=True)
class ArmyAggregates:
    """Per-army sums and means used by the closed-form models.

    ``dpf_air``/``dpf_ground``/``dpf_both`` partition the army's DPF by
    weapon capability (air-only / ground-only / both weapons), while the
    ``mean_dpf_*`` fields average over *all* units the DPF the army can
    point at each target domain (units unable to attack it count as 0).
    """

    hp_air: float
    hp_ground: float
    dpf_air: float
    dpf_ground: float
    dpf_both: float
    avg_hp: float
    n_units: int
    mean_dpf_air: float
    mean_dpf_ground: float


@dataclass(frozen=True)
class LanchesterParams:
    """Attrition rates: alpha kills A units per frame, beta kills B units."""

    alpha: float
    beta: float
    intensity: float
    r_alpha: float
    r_beta: float


@dataclass(frozen=True)
class CombatOutcome:
    """Predicted end of a combat: survivors, duration, winner.

    ``kills`` logs (frame, uid) destruction events for models that
    produce a schedule (decreasing and the tick oracle); closed-form
    models leave it empty.
    """

    survivors_a: tuple[Unit, ...]
    survivors_b: tuple[Unit, ...]
    duration_frames: float
    winner: Winner
    model_id: str
    kills: tuple[tuple[float, int], ...] = field(default=())

    def __post_init__(self) -> None:
        if not (self.duration_frames >= 0 and math.isfinite(self.duration_frames)):
            raise ValidationError("duration must be finite and >= 0")
        if self.winner is not Winner.STALEMATE and self.survivors_a and self.survivors_b:
            raise ValidationError("both sides have survivors in a non-stalemate outcome")

    def swapped(self) -> "CombatOutcome":
        """Mirror the outcome roles (army A <-> army B)."""
        flipped = {Winner.A: Winner.B, Winner.B: Winner.A}.get(self.winner, self.winner)
        return CombatOutcome(
            survivors_a=self.survivors_b,
            survivors_b=self.survivors_a,
            duration_frames=self.duration_frames,
            winner=flipped,
            model_id=self.model_id,
            kills=self.kills,
        )


def aggregate_army(
    units: tuple[Unit, ...], dpf_vector: np.ndarray, catalog: Catalog
) -> ArmyAggregates:
    hp_air = hp_ground = 0.0
    dpf_air = dpf_ground = dpf_both = 0.0
    vs_air = vs_ground = 0.0
    total_hp = 0.0
    for u in units:
        t = catalog[u.type_id]
        h = u.health
        total_hp += h
        if t.is_flyer:
            hp_air += h
        else:
            hp_ground += h
        d = float(dpf_vector[u.type_id])
        if t.can_attack_ground and t.can_attack_air:
            dpf_both += d
            vs_air += d
            vs_ground += d
        elif t.can_attack_ground:
            dpf_ground += d
            vs_ground += d
        elif t.can_attack_air:
            dpf_air += d
            vs_air += d
    n = len(units)
    return ArmyAggregates(
        hp_air=hp_air,
        hp_ground=hp_ground,
        dpf_air=dpf_air,
        dpf_ground=dpf_ground,
        dpf_both=dpf_both,
        avg_hp=total_hp / n,
        n_units=n,
        mean_dpf_air=vs_air / n,
        mean_dpf_ground=vs_ground / n,
    )


def _avg_dpf(attacker: ArmyAggregates, defender: ArmyAggregates) -> float:
    """Average DPF the attacker army can point at the defender army.

    Blend of the attacker's per-domain mean DPF weighted by how much of
    the defender's health sits in each domain; an all-ground or all-air
    defender degenerates to the single-domain mean.
    """
    total = defender.hp_air + defender.hp_ground
    if total <= 0:
        return 0.0
    w_air = defender.hp_air / total
    w_ground = defender.hp_ground / total
    return attacker.mean_dpf_air * w_air + attacker.mean_dpf_ground * w_ground


def lanchester_params(
    state: CombatState, dpf_vector: np.ndarray, catalog: Catalog
) -> LanchesterParams:
    agg_a = aggregate_army(state.army_a, dpf_vector, catalog)
    agg_b = aggregate_army(state.army_b, dpf_vector, catalog)
    alpha = _avg_dpf(agg_b, agg_a) / agg_a.avg_hp
    beta = _avg_dpf(agg_a, agg_b) / agg_b.avg_hp
    if alpha > 0 and beta > 0:
        r_alpha = math.sqrt(alpha / beta)
        r_beta = math.sqrt(beta / alpha)
    elif alpha == 0 and beta == 0:
        r_alpha = r_beta = 0.0
    elif beta == 0:
        r_alpha, r_beta = math.inf, 0.0
    else:
        r_alpha, r_beta = 0.0, math.inf
    return LanchesterParams(
        alpha=alpha,
        beta=beta,
        intensity=math.sqrt(alpha * beta),
        r_alpha=r_alpha,
        r_beta=r_beta,
    )


def lanchester_counts_at(
    a0: float, b0: float, params: LanchesterParams, t: float
) -> tuple[float, float]:
    """Continuous remaining counts at time t under the attrition ODEs.

    Valid for t in [0, end-of-combat]; past the end the expressions keep
    following the ODEs and can go negative.
    """
    if t < 0:
        raise ValidationError("t must be >= 0")
    alpha, beta = params.alpha, params.beta
    if alpha == 0.0 and beta == 0.0:
        return a0, b0
    if alpha == 0.0:
        return a0, b0 - beta * a0 * t
    if beta == 0.0:
        return a0 - alpha * b0 * t, b0
    i = params.intensity
    grow = math.exp(i * t)
    decay = 1.0 / grow
    a_t = 0.5 * ((a0 - params.r_alpha * b0) * grow + (a0 + params.r_alpha * b0) * decay)
    b_t = 0.5 * ((b0 - params.r_beta * a0) * grow + (b0 + params.r_beta * a0) * decay)
    return a_t, b_t


def lanchester_state_at(
    state: CombatState, params: LanchesterParams, t: float
) -> tuple[float, float]:
    """Remaining unit counts of both armies at time t (partial-combat cutoff)."""
    return lanchester_counts_at(len(state.army_a), len(state.army_b), params, t)


def _realize_survivors(
    units: tuple[Unit, ...],
    destruction_order: list[Unit],
    count: float,
) -> tuple[Unit, ...]:
    """Turn a continuous surviving count into concrete units.

    Keeps ceil(count) units counting back from the end of the destruction
    order; the earliest-destroyed kept unit carries the fractional part as
    scaled health.
    """
    n = len(units)
    snapped = round(count)
    if math.isclose(count, snapped, rel_tol=0, abs_tol=1e-9):
        count = float(snapped)
    keep = math.ceil(count)
    if keep <= 0:
        return ()
    keep = min(keep, n)
    kept = destruction_order[n - keep :]
    frac = count - math.floor(count)
    if frac > 0:
        first = kept[0]
        kept = [first.with_health(first.health * frac)] + kept[1:]
    return tuple(sorted(kept, key=lambda u: u.uid))


def lanchester_closed_form(
    n_a: float, n_b: float, params: LanchesterParams
) -> tuple[Winner, float, float]:
    """Pure square-law prediction on unit counts.

    Returns (winner, duration, winner's surviving count). Draws report an
    infinite duration (the continuous model never finishes); stalemates
    mean neither side can hurt the other.
    """
    alpha, beta = params.alpha, params.beta
    if alpha == 0.0 and beta == 0.0:
        return Winner.STALEMATE, 0.0, 0.0
    # |A0|/|B0| vs R_alpha, compared cross-multiplied so the test is exact
    # under a player swap
    lhs = n_a * math.sqrt(beta)
    rhs = n_b * math.sqrt(alpha)
    if math.isclose(lhs, rhs, rel_tol=1e-12):
        return Winner.DRAW, math.inf, 0.0
    if lhs > rhs:
        winner = Winner.A
        winner_n, loser_n = n_a, n_b
        rate_win, rate_lose = beta, alpha
    else:
        winner = Winner.B
        winner_n, loser_n = n_b, n_a
        rate_win, rate_lose = alpha, beta
    if rate_lose == 0.0:
        # one-sided: the loser never shoots back and decays linearly
        duration = loser_n / (rate_win * winner_n)
    else:
        ratio = (loser_n / winner_n) * math.sqrt(rate_lose / rate_win)
        duration = math.log((1.0 + ratio) / (1.0 - ratio)) / (2.0 * params.intensity)
    radicand = winner_n * winner_n - (rate_lose / rate_win) * loser_n * loser_n
    if radicand < 0:
        log.warning("negative survivor radicand %.3g clamped to 0", radicand)
        radicand = 0.0
    return winner, duration, math.sqrt(radicand)


def lanchester_simulate(
    state: CombatState,
    dpf_vector: np.ndarray,
    policy: TargetSelectionPolicy,
    catalog: Catalog,
) -> CombatOutcome:
    """Square-law attrition model with a target-selection survivor realization.

    Predicts the winner from the initial force ratio against the relative
    effectiveness, the duration from the logarithmic closed form, and the
    surviving count from the square-root law; the loser is removed whole
    and the winner's fractional survivor count is realized in reverse
    destruction order. Exact ties fall back to the sustained model for
    the time prediction, with both armies annihilated.
    """
    params = lanchester_params(state, dpf_vector, catalog)
    model_id = "lanchester"
    winner_flag, duration, surviving = lanchester_closed_form(
        float(len(state.army_a)), float(len(state.army_b)), params
    )
    if winner_flag is Winner.STALEMATE:
        return CombatOutcome(
            survivors_a=state.army_a,
            survivors_b=state.army_b,
            duration_frames=0.0,
            winner=Winner.STALEMATE,
            model_id=model_id,
        )

    def draw_outcome() -> CombatOutcome:
        t_ab, t_ba = sustained_kill_times(state, dpf_vector, catalog)
        finite = [t for t in (t_ab, t_ba) if math.isfinite(t)]
        return CombatOutcome(
            survivors_a=(),
            survivors_b=(),
            duration_frames=min(finite) if finite else 0.0,
            winner=Winner.DRAW,
            model_id=model_id,
        )

    if winner_flag is Winner.DRAW or surviving <= 0.0:
        return draw_outcome()
    if winner_flag is Winner.A:
        winner_units, order_attackers = state.army_a, state.army_b
    else:
        winner_units, order_attackers = state.army_b, state.army_a
    order = policy.destruction_order(winner_units, order_attackers, catalog)
    kept = _realize_survivors(winner_units, order, surviving)
    survivors_a = kept if winner_flag is Winner.A else ()
    survivors_b = kept if winner_flag is Winner.B else ()
    return CombatOutcome(
        survivors_a=survivors_a,
        survivors_b=survivors_b,
        duration_frames=duration,
        winner=winner_flag,
        model_id=model_id,
    )


# ---------------------------------------------------------------------------
# Sustained model


@dataclass(frozen=True)
class _Direction:
    """Time for the attacker to destroy the defender, by domain."""

    t_total: float
    eff_dpf_air: float
    eff_dpf_ground: float


def _kill_direction(defender: ArmyAggregates, attacker: ArmyAggregates) -> _Direction:
    def time_for(hp: float, dpf: float) -> float:
        if hp <= 0:
            return 0.0
        return hp / dpf if dpf > 0 else math.inf

    t_air = time_for(defender.hp_air, attacker.dpf_air)
    t_ground = time_for(defender.hp_ground, attacker.dpf_ground)
    # The slower-to-kill domain also receives the dual-weapon DPF.
    if t_air > t_ground:
        eff_air = attacker.dpf_air + attacker.dpf_both
        eff_ground = attacker.dpf_ground
        t_air = time_for(defender.hp_air, eff_air)
    else:
        eff_air = attacker.dpf_air
        eff_ground = attacker.dpf_ground + attacker.dpf_both
        t_ground = time_for(defender.hp_ground, eff_ground)
    return _Direction(
        t_total=max(t_air, t_ground), eff_dpf_air=eff_air, eff_dpf_ground=eff_ground
    )


def sustained_kill_times(
    state: CombatState, dpf_vector: np.ndarray, catalog: Catalog
) -> tuple[float, float]:
    """(time to destroy army A, time to destroy army B) at sustained DPF."""
    agg_a = aggregate_army(state.army_a, dpf_vector, catalog)
    agg_b = aggregate_army(state.army_b, dpf_vector, catalog)
    return _kill_direction(agg_a, agg_b).t_total, _kill_direction(agg_b, agg_a).t_total


def _apply_domain_budgets(
    destruction_order: list[Unit],
    budget_ground: float,
    budget_air: float,
    catalog: Catalog,
    kills: list[tuple[float, int]] | None = None,
    at_time: float = 0.0,
) -> tuple[Unit, ...]:
    """Spend per-domain damage budgets over units in destruction order."""
    survivors: list[Unit] = []
    budgets = {True: budget_air, False: budget_ground}
    for u in destruction_order:
        flyer = catalog[u.type_id].is_flyer
        budget = budgets[flyer]
        h = u.health
        if budget >= h:
            budgets[flyer] = budget - h
            if kills is not None:
                kills.append((at_time, u.uid))
        elif budget > 0:
            budgets[flyer] = 0.0
            survivors.append(u.with_health(h - budget))
        else:
            survivors.append(u)
    return tuple(sorted(survivors, key=lambda u: u.uid))


def sustained_simulate(
    state: CombatState,
    dpf_vector: np.ndarray,
    policy: TargetSelectionPolicy,
    catalog: Catalog,
) -> CombatOutcome:
    """Constant-DPF model: each army's damage output never decays.

    Kill times are computed per target domain (with dual-weapon DPF
    reassigned to the slower domain) and the combat lasts until the
    faster-killed army dies. The loser is destroyed whole; the winner
    takes the loser's damage budget (effective domain DPF x duration)
    spread over its units in policy order, so it can suffer partial
    casualties.
    """
    model_id = "sustained"
    agg_a = aggregate_army(state.army_a, dpf_vector, catalog)
    agg_b = aggregate_army(state.army_b, dpf_vector, catalog)
    dir_a = _kill_direction(agg_a, agg_b)  # B destroying A
    dir_b = _kill_direction(agg_b, agg_a)  # A destroying B
    if math.isinf(dir_a.t_total) and math.isinf(dir_b.t_total):
        return CombatOutcome(
            survivors_a=state.army_a,
            survivors_b=state.army_b,
            duration_frames=0.0,
            winner=Winner.STALEMATE,
            model_id=model_id,
        )
    both_finite = math.isfinite(dir_a.t_total) and math.isfinite(dir_b.t_total)
    if both_finite and math.isclose(dir_a.t_total, dir_b.t_total, rel_tol=DRAW_REL_TOL):
        return CombatOutcome(
            survivors_a=(),
            survivors_b=(),
            duration_frames=dir_a.t_total,
            winner=Winner.DRAW,
            model_id=model_id,
        )
    if dir_b.t_total < dir_a.t_total:
        # Army B dies first.
        duration = dir_b.t_total
        winner_units, winner_attackers = state.army_a, state.army_b
        loser_dir = dir_a  # the loser's effective DPF against the winner
        winner_flag = Winner.A
    else:
        duration = dir_a.t_total
        winner_units, winner_attackers = state.army_b, state.army_a
        loser_dir = dir_b
        winner_flag = Winner.B
    order = policy.destruction_order(winner_units, winner_attackers, catalog)
    kept = _apply_domain_budgets(
        order,
        budget_ground=loser_dir.eff_dpf_ground * duration,
        budget_air=loser_dir.eff_dpf_air * duration,
        catalog=catalog,
    )
    if not kept:
        # Float pathology: the loser's budget covered the whole winner.
        log.warning("sustained winner fully consumed by budget; reporting draw")
        return CombatOutcome((), (), duration, Winner.DRAW, model_id)
    survivors_a = kept if winner_flag is Winner.A else ()
    survivors_b = kept if winner_flag is Winner.B else ()
    return CombatOutcome(
        survivors_a=survivors_a,
        survivors_b=survivors_b,
        duration_frames=duration,
        winner=winner_flag,
        model_id=model_id,
    )


# ---------------------------------------------------------------------------
# Decreasing model


def decreasing_simulate(
    state: CombatState,
    dpf_table: DpfTable,
    policy: TargetSelectionPolicy,
    catalog: Catalog,
) -> CombatOutcome:
    """Event-driven model: army DPF decreases as units die.

    Both armies are sorted into destruction order; each round the time to
    kill each side's current target (aggregating the per-pair DPF of every
    living attacker able to hit it) is compared, the faster kill happens,
    and the slower side's target loses the damage accumulated meanwhile.
    Unkillable targets are skipped permanently. Ends on exhaustion or when
    neither side can kill (stalemate).
    """
    model_id = "decreasing"
    per_pair = dpf_table.per_pair.tolist()  # plain lists: hot loop
    a_order = policy.destruction_order(state.army_a, state.army_b, catalog)
    b_order = policy.destruction_order(state.army_b, state.army_a, catalog)
    a_live: list[list] = [[u, u.health] for u in a_order]
    b_live: list[list] = [[u, u.health] for u in b_order]
    a_counts: dict[int, int] = {}
    b_counts: dict[int, int] = {}
    for u in state.army_a:
        a_counts[u.type_id] = a_counts.get(u.type_id, 0) + 1
    for u in state.army_b:
        b_counts[u.type_id] = b_counts.get(u.type_id, 0) + 1

    def rate_against(counts: dict[int, int], target_type: int) -> float:
        return sum(n * per_pair[t][target_type] for t, n in counts.items() if n)

    elapsed = 0.0
    kills: list[tuple[float, int]] = []
    i = j = 0
    stalemated = False
    while a_live and b_live:
        # Advance each index past targets the opposing army cannot kill;
        # attacker sets only shrink, so skipped targets stay unkillable.
        t_b = math.inf
        rate_a = 0.0
        while j < len(b_live):
            rate_a = rate_against(a_counts, b_live[j][0].type_id)
            if rate_a > 0:
                t_b = b_live[j][1] / rate_a
                break
            j += 1
        t_a = math.inf
        rate_b = 0.0
        while i < len(a_live):
            rate_b = rate_against(b_counts, a_live[i][0].type_id)
            if rate_b > 0:
                t_a = a_live[i][1] / rate_b
                break
            i += 1
        if math.isinf(t_b) and math.isinf(t_a):
            stalemated = True
            break
        if math.isclose(t_b, t_a, rel_tol=DRAW_REL_TOL):
            elapsed += t_b
            victim_b = b_live.pop(j)[0]
            victim_a = a_live.pop(i)[0]
            b_counts[victim_b.type_id] -= 1
            a_counts[victim_a.type_id] -= 1
            kills.append((elapsed, victim_a.uid))
            kills.append((elapsed, victim_b.uid))
        elif t_b < t_a:
            elapsed += t_b
            victim = b_live.pop(j)[0]
            b_counts[victim.type_id] -= 1
            kills.append((elapsed, victim.uid))
            if i < len(a_live):
                a_live[i][1] -= rate_b * t_b
        else:
            elapsed += t_a
            victim = a_live.pop(i)[0]
            a_counts[victim.type_id] -= 1
            kills.append((elapsed, victim.uid))
            if j < len(b_live):
                b_live[j][1] -= rate_a * t_a

    survivors_a = tuple(
        sorted((u.with_health(h) for u, h in a_live), key=lambda u: u.uid)
    )
    survivors_b = tuple(
        sorted((u.with_health(h) for u, h in b_live), key=lambda u: u.uid)
    )
    if stalemated:
        winner = Winner.STALEMATE
    elif not survivors_a and not survivors_b:
        winner = Winner.DRAW
    elif not survivors_b:
        winner = Winner.A
    else:
        winner = Winner.B
    return CombatOutcome(
        survivors_a=survivors_a,
        survivors_b=survivors_b,
        duration_frames=elapsed,
        winner=winner,
        model_id=model_id,
        kills=tuple(kills),
    )


# ---------------------------------------------------------------------------
# Tick oracle


def tick_oracle_simulate(
    state: CombatState,
    dpf_table: DpfTable,
    policy: TargetSelectionPolicy,
    catalog: Catalog,
    max_frames: int = 100_000,
    targeting: str = "focus",
) -> CombatOutcome:
    """Brute-force discretization: 1-frame ticks, simultaneous damage.

    Every living unit deals its per-pair DPF to a policy-chosen enemy each
    frame; damage lands at frame end, so mutual kills in the same frame
    are draws and overkill within a frame is wasted. ``targeting`` is
    either ``focus`` (everyone hits the first attackable unit in policy
    order) or ``spread`` (attackers rotate over all attackable targets).
    Runs to annihilation or ``max_frames`` (stalemate / partial combat).
    """
    if max_frames <= 0:
        raise ValidationError("max_frames must be > 0")
    if targeting not in ("focus", "spread"):
        raise ValidationError(f"unknown targeting mode {targeting!r}")
    model_id = "tick_oracle"
    per_pair = dpf_table.per_pair.tolist()
    a_order = policy.destruction_order(state.army_a, state.army_b, catalog)
    b_order = policy.destruction_order(state.army_b, state.army_a, catalog)
    armies = {
        "a": [[u, u.health] for u in a_order],
        "b": [[u, u.health] for u in b_order],
    }
    kills: list[tuple[float, int]] = []
    duration = float(max_frames)
    ended = False
    for frame in range(1, max_frames + 1):
        damage: dict[int, float] = {}
        dealt = False
        for side, other in (("a", "b"), ("b", "a")):
            attackers = armies[side]
            targets = armies[other]
            if targeting == "focus":
                first_any = first_ground = first_air = None
                for entry in targets:
                    flyer = catalog[entry[0].type_id].is_flyer
                    if first_any is None:
                        first_any = entry
                    if flyer and first_air is None:
                        first_air = entry
                    if not flyer and first_ground is None:
                        first_ground = entry
                    if first_air is not None and first_ground is not None:
                        break
                for unit, _h in attackers:
                    t = catalog[unit.type_id]
                    if t.can_attack_ground and t.can_attack_air:
                        chosen = first_any
                    elif t.can_attack_ground:
                        chosen = first_ground
                    elif t.can_attack_air:
                        chosen = first_air
                    else:
                        chosen = None
                    if chosen is None:
                        continue
                    dmg = per_pair[unit.type_id][chosen[0].type_id]
                    if dmg > 0:
                        damage[chosen[0].uid] = damage.get(chosen[0].uid, 0.0) + dmg
                        dealt = True
            else:
                ground_targets = [
                    e for e in targets if not catalog[e[0].type_id].is_flyer
                ]
                air_targets = [e for e in targets if catalog[e[0].type_id].is_flyer]
                idx = 0
                for unit, _h in attackers:
                    t = catalog[unit.type_id]
                    if t.can_attack_ground and t.can_attack_air:
                        pool = targets
                    elif t.can_attack_ground:
                        pool = ground_targets
                    elif t.can_attack_air:
                        pool = air_targets
                    else:
                        continue
                    if not pool:
                        continue
                    chosen = pool[(idx + frame) % len(pool)]
                    idx += 1
                    dmg = per_pair[unit.type_id][chosen[0].type_id]
                    if dmg > 0:
                        damage[chosen[0].uid] = damage.get(chosen[0].uid, 0.0) + dmg
                        dealt = True
        if not dealt:
            # Deterministic no-damage frame: nothing will ever change.
            break
        for side in ("a", "b"):
            remaining = []
            for entry in armies[side]:
                dmg = damage.get(entry[0].uid)
                if dmg:
                    entry[1] -= dmg
                if entry[1] <= 0:
                    kills.append((float(frame), entry[0].uid))
                else:
                    remaining.append(entry)
            armies[side] = remaining
        if not armies["a"] or not armies["b"]:
            duration = float(frame)
            ended = True
            break

    survivors_a = tuple(
        sorted((u.with_health(h) for u, h in armies["a"]), key=lambda u: u.uid)
    )
    survivors_b = tuple(
        sorted((u.with_health(h) for u, h in armies["b"]), key=lambda u: u.uid)
    )
    if not ended:
        winner = Winner.STALEMATE
    elif not survivors_a and not survivors_b:
        winner = Winner.DRAW
    elif not survivors_b:
        winner = Winner.A
    else:
        winner = Winner.B
    return CombatOutcome(
        survivors_a=survivors_a,
        survivors_b=survivors_b,
        duration_frames=duration,
        winner=winner,
        model_id=model_id,
        kills=tuple(kills),
    )
