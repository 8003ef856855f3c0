"""Target selection policies: which enemy unit an army destroys next.

A policy yields a destruction order over the defending units. The Borda
policy keeps three score vectors and picks one based on the attacking
army's composition (only ground units, only air units, or mixed).
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass

import numpy as np

from .core import destroy_score
from .errors import ValidationError
from .types import Catalog, Unit


class PolicyKind(enum.Enum):
    RANDOM = "random"
    DESTROY_SCORE = "destroy_score"
    BORDA_COUNT = "borda_count"


class ArmyComposition(enum.Enum):
    GROUND = "ground"
    AIR = "air"
    MIXED = "mixed"


@dataclass(frozen=True)
class BordaScores:
    """Per-type average Borda points, one vector per attacker composition."""

    ground: np.ndarray
    air: np.ndarray
    mixed: np.ndarray

    def __post_init__(self) -> None:
        for name in ("ground", "air", "mixed"):
            vec = getattr(self, name)
            if not np.isfinite(vec).all():
                raise ValidationError(f"borda scores ({name}) must be finite")

    def for_composition(self, comp: ArmyComposition) -> np.ndarray:
        return {
            ArmyComposition.GROUND: self.ground,
            ArmyComposition.AIR: self.air,
            ArmyComposition.MIXED: self.mixed,
        }[comp]

    def to_json(self) -> dict:
        return {
            "ground": self.ground.tolist(),
            "air": self.air.tolist(),
            "mixed": self.mixed.tolist(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "BordaScores":
        return cls(
            ground=np.asarray(data["ground"], dtype=float),
            air=np.asarray(data["air"], dtype=float),
            mixed=np.asarray(data["mixed"], dtype=float),
        )


def army_composition(units: list[Unit] | tuple[Unit, ...], catalog: Catalog) -> ArmyComposition:
    """Classify an army by its units' domains (flyer flags), not weapons."""
    any_air = any(catalog[u.type_id].is_flyer for u in units)
    any_ground = any(not catalog[u.type_id].is_flyer for u in units)
    if any_air and any_ground:
        return ArmyComposition.MIXED
    return ArmyComposition.AIR if any_air else ArmyComposition.GROUND


@dataclass(frozen=True)
class TargetSelectionPolicy:
    """Ordering rule over enemy units. Random carries an explicit seed."""

    kind: PolicyKind
    seed: int | None = None
    borda: BordaScores | None = None

    def __post_init__(self) -> None:
        if self.kind is PolicyKind.RANDOM and self.seed is None:
            raise ValidationError("random policy requires an explicit seed")
        if self.kind is PolicyKind.BORDA_COUNT and self.borda is None:
            raise ValidationError("borda policy requires score vectors")

    def destruction_order(
        self,
        targets: list[Unit] | tuple[Unit, ...],
        attackers: list[Unit] | tuple[Unit, ...],
        catalog: Catalog,
    ) -> list[Unit]:
        """Return targets sorted most-preferred first. Ties break on ascending uid."""
        if self.kind is PolicyKind.RANDOM:
            ordered = sorted(targets, key=lambda u: u.uid)
            rng = random.Random(self.seed)
            rng.shuffle(ordered)
            return ordered
        if self.kind is PolicyKind.DESTROY_SCORE:
            scores = catalog.destroy_scores
            return sorted(targets, key=lambda u: (-scores[u.type_id], u.uid))
        scores = self.borda.for_composition(army_composition(attackers, catalog))
        return sorted(targets, key=lambda u: (-scores[u.type_id], u.uid))

    def to_json(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.seed is not None:
            d["seed"] = self.seed
        if self.borda is not None:
            d["borda"] = self.borda.to_json()
        return d

    @classmethod
    def from_json(cls, data: dict) -> "TargetSelectionPolicy":
        borda = data.get("borda")
        return cls(
            kind=PolicyKind(data["kind"]),
            seed=data.get("seed"),
            borda=BordaScores.from_json(borda) if borda is not None else None,
        )


def random_policy(seed: int) -> TargetSelectionPolicy:
    return TargetSelectionPolicy(kind=PolicyKind.RANDOM, seed=seed)


def destroy_score_policy() -> TargetSelectionPolicy:
    return TargetSelectionPolicy(kind=PolicyKind.DESTROY_SCORE)


def borda_policy(scores: BordaScores) -> TargetSelectionPolicy:
    return TargetSelectionPolicy(kind=PolicyKind.BORDA_COUNT, borda=scores)
