"""Static evaluators and damage-per-frame parameter tables.

DPF (damage per frame) comes in two granularities: a k x k per-matchup
matrix and a length-k per-unit vector obtained by min-projection over
attackable targets. The static table is computed directly from weapon
stats; learned tables come from :mod:`combatsim.learning`.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .types import Catalog, CombatState, UnitTypeStats

log = logging.getLogger(__name__)


class DpfProvenance(enum.Enum):
    STATIC = "static"
    LEARNED = "learned"


@dataclass(frozen=True)
class DpfTable:
    """Effective damage-per-frame parameters for one catalog.

    ``per_pair[i, j]`` is the DPF a type-i unit deals to a type-j unit;
    entries are zero wherever type i cannot attack type j's domain.
    ``per_unit_ground``/``per_unit_air`` aggregate by target domain.
    """

    per_pair: np.ndarray
    per_unit_ground: np.ndarray
    per_unit_air: np.ndarray
    provenance: DpfProvenance

    def __post_init__(self) -> None:
        k = self.per_pair.shape[0]
        if self.per_pair.shape != (k, k):
            raise ValidationError("per_pair must be square")
        if self.per_unit_ground.shape != (k,) or self.per_unit_air.shape != (k,):
            raise ValidationError("per-unit vectors must have length k")
        if (self.per_pair < 0).any():
            raise ValidationError("DPF entries must be >= 0")

    @property
    def k(self) -> int:
        return self.per_pair.shape[0]

    def validate_against(self, catalog: Catalog) -> None:
        if self.k != catalog.k:
            raise ValidationError(f"table is {self.k}x{self.k} but catalog has k={catalog.k}")
        for i, ti in enumerate(catalog.types):
            for j, tj in enumerate(catalog.types):
                if not ti.can_attack_type(tj) and self.per_pair[i, j] != 0:
                    raise ValidationError(
                        f"per_pair[{ti.name}, {tj.name}] nonzero for unattackable pair"
                    )

    def to_json(self) -> dict:
        return {
            "provenance": self.provenance.value,
            "per_pair": self.per_pair.tolist(),
            "per_unit_ground": self.per_unit_ground.tolist(),
            "per_unit_air": self.per_unit_air.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DpfTable":
        return cls(
            per_pair=np.asarray(data["per_pair"], dtype=float),
            per_unit_ground=np.asarray(data["per_unit_ground"], dtype=float),
            per_unit_air=np.asarray(data["per_unit_air"], dtype=float),
            provenance=DpfProvenance(data["provenance"]),
        )


def attackability_mask(catalog: Catalog) -> np.ndarray:
    """Boolean k x k matrix: entry (i, j) true iff type i can attack type j."""
    k = catalog.k
    mask = np.zeros((k, k), dtype=bool)
    for i, ti in enumerate(catalog.types):
        for j, tj in enumerate(catalog.types):
            mask[i, j] = ti.can_attack_type(tj)
    return mask


def static_dpf(catalog: Catalog) -> DpfTable:
    """DPF table from weapon stats alone: damage / cooldown per domain."""
    k = catalog.k
    ground = np.zeros(k)
    air = np.zeros(k)
    for i, t in enumerate(catalog.types):
        if t.can_attack_ground:
            ground[i] = t.weapon_damage_ground / t.cooldown_ground
        if t.can_attack_air:
            air[i] = t.weapon_damage_air / t.cooldown_air
    per_pair = np.zeros((k, k))
    for j, tj in enumerate(catalog.types):
        per_pair[:, j] = air if tj.is_flyer else ground
    return DpfTable(
        per_pair=per_pair,
        per_unit_ground=ground,
        per_unit_air=air,
        provenance=DpfProvenance.STATIC,
    )


def dpf_table_from_vector(vector: np.ndarray, catalog: Catalog) -> DpfTable:
    """Expand a per-unit DPF vector to a per-pair table (zeros where unattackable)."""
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (catalog.k,):
        raise ValidationError("vector length must equal catalog size")
    mask = attackability_mask(catalog)
    per_pair = np.where(mask, vector[:, None], 0.0)
    ground = np.where([t.can_attack_ground for t in catalog.types], vector, 0.0)
    air = np.where([t.can_attack_air for t in catalog.types], vector, 0.0)
    return DpfTable(
        per_pair=per_pair,
        per_unit_ground=ground,
        per_unit_air=air,
        provenance=DpfProvenance.STATIC,
    )


def project_min_dpf(table: DpfTable) -> np.ndarray:
    """Per-unit DPF vector: row-wise minimum over positive entries.

    Zero entries are excluded from the minimum, whether structural
    (unattackable domain) or no-data (a learned pair never observed).
    A row with no positive entry projects to 0 and is logged.
    """
    result = np.zeros(table.k)
    toothless: list[int] = []
    for i in range(table.k):
        row = table.per_pair[i]
        positive = row[row > 0]
        if positive.size:
            result[i] = float(positive.min())
        else:
            toothless.append(i)
    if toothless:
        log.warning("types with no positive DPF entry project to 0: %s", toothless)
    return result


def destroy_score(unit_type: UnitTypeStats) -> float:
    """Unit value proxy: 2 x mineral + 4 x gas, unless the type overrides it."""
    if unit_type.mineral_cost < 0 or unit_type.gas_cost < 0:
        raise ValidationError(f"type {unit_type.name}: negative cost")
    if unit_type.destroy_score_override is not None:
        return unit_type.destroy_score_override
    return 2.0 * unit_type.mineral_cost + 4.0 * unit_type.gas_cost


def ltd(state: CombatState, dpf_vector: np.ndarray) -> float:
    """Life-time-damage score: sum of health x DPF, army A minus army B."""
    score_a = sum(u.health * dpf_vector[u.type_id] for u in state.army_a)
    score_b = sum(u.health * dpf_vector[u.type_id] for u in state.army_b)
    return score_a - score_b


def ltd2(state: CombatState, dpf_vector: np.ndarray) -> float:
    """LTD2 score: sum of sqrt(health) x DPF, army A minus army B.

    Positive predicts A wins, negative B, zero a draw. Weighting by the
    square root of health favours many damaged units over one healthy one.
    """
    score_a = sum(u.health ** 0.5 * dpf_vector[u.type_id] for u in state.army_a)
    score_b = sum(u.health ** 0.5 * dpf_vector[u.type_id] for u in state.army_b)
    return score_a - score_b
