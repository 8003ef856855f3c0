"""Core domain types: unit-type catalogs, units, and combat states.

Every type here is an immutable value; all operations elsewhere in the
package are pure functions over them, so states can be shared freely
between threads or processes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import ValidationError

CATALOG_FORMAT_VERSION = 1


@dataclass(frozen=True, slots=True)
class UnitTypeStats:
    """Static per-type combat statistics.

    A weapon exists for a domain when the matching damage is > 0; the
    matching cooldown must then be > 0 (frames between hits). ``range_*``
    are attack ranges in map pixels, ``top_speed`` is pixels per frame.
    """

    type_id: int
    name: str
    max_hp: float
    max_shield: float = 0.0
    max_energy: float = 0.0
    mineral_cost: float = 0.0
    gas_cost: float = 0.0
    weapon_damage_ground: float = 0.0
    weapon_damage_air: float = 0.0
    cooldown_ground: float = 0.0
    cooldown_air: float = 0.0
    range_ground: float = 0.0
    range_air: float = 0.0
    top_speed: float = 0.0
    is_flyer: bool = False
    is_building: bool = False
    is_base: bool = False
    is_worker: bool = False
    is_detector: bool = False
    is_transport: bool = False
    destroy_score_override: float | None = None

    @property
    def can_attack_ground(self) -> bool:
        return self.weapon_damage_ground > 0

    @property
    def can_attack_air(self) -> bool:
        return self.weapon_damage_air > 0

    @property
    def can_attack(self) -> bool:
        return self.can_attack_ground or self.can_attack_air

    @property
    def is_military(self) -> bool:
        """Units tracked by combat detection: armed, detector, or transport."""
        return self.can_attack or self.is_detector or self.is_transport

    @property
    def max_health(self) -> float:
        return self.max_hp + self.max_shield

    def can_attack_type(self, target: "UnitTypeStats") -> bool:
        """Attackability predicate: air weapon vs flyers, ground weapon vs the rest."""
        return self.can_attack_air if target.is_flyer else self.can_attack_ground

    def attack_range_vs(self, target: "UnitTypeStats") -> float:
        return self.range_air if target.is_flyer else self.range_ground


@dataclass(frozen=True, slots=True)
class Unit:
    """One concrete unit. ``pos`` is optional for abstract combats."""

    uid: int
    type_id: int
    hp: float
    shield: float = 0.0
    energy: float = 0.0
    pos: tuple[float, float] | None = None

    @property
    def health(self) -> float:
        """Effective health used by all models and evaluators: hp + shield."""
        return self.hp + self.shield

    def with_health(self, health: float) -> "Unit":
        """Return a copy at the given remaining health, depleting shield first."""
        if health <= 0:
            return replace(self, hp=0.0, shield=0.0)
        if health >= self.hp:
            return replace(self, shield=health - self.hp)
        return replace(self, hp=health, shield=0.0)


@dataclass(frozen=True)
class Catalog:
    """Validated collection of unit types with contiguous ids 0..k-1."""

    types: tuple[UnitTypeStats, ...]
    name: str = "catalog"

    def __post_init__(self) -> None:
        if not self.types:
            raise ValidationError("catalog is empty")
        seen: set[int] = set()
        for t in self.types:
            if t.type_id in seen:
                raise ValidationError(f"duplicate type_id {t.type_id} in catalog")
            seen.add(t.type_id)
            if t.max_hp <= 0:
                raise ValidationError(f"type {t.name}: max_hp must be > 0")
            if t.weapon_damage_ground > 0 and t.cooldown_ground <= 0:
                raise ValidationError(f"type {t.name}: ground weapon without cooldown")
            if t.weapon_damage_air > 0 and t.cooldown_air <= 0:
                raise ValidationError(f"type {t.name}: air weapon without cooldown")
        if seen != set(range(len(self.types))):
            raise ValidationError("type_ids must be contiguous 0..k-1")
        by_id = sorted(self.types, key=lambda t: t.type_id)
        object.__setattr__(self, "types", tuple(by_id))

    @property
    def k(self) -> int:
        return len(self.types)

    @property
    def destroy_scores(self) -> tuple[float, ...]:
        """Per-type destroy scores, cached (hot path for policies and evals)."""
        cached = self.__dict__.get("_destroy_scores")
        if cached is None:
            cached = tuple(
                t.destroy_score_override
                if t.destroy_score_override is not None
                else 2.0 * t.mineral_cost + 4.0 * t.gas_cost
                for t in self.types
            )
            self.__dict__["_destroy_scores"] = cached
        return cached

    def __getitem__(self, type_id: int) -> UnitTypeStats:
        try:
            return self.types[type_id]
        except IndexError:
            raise ValidationError(f"unknown type_id {type_id}") from None

    def type_of(self, unit: Unit) -> UnitTypeStats:
        return self[unit.type_id]

    def can_attack_unit(self, attacker: Unit, target: Unit) -> bool:
        return self[attacker.type_id].can_attack_type(self[target.type_id])

    def to_json(self) -> dict:
        entries = []
        for t in self.types:
            d = {
                "type_id": t.type_id,
                "name": t.name,
                "max_hp": t.max_hp,
                "max_shield": t.max_shield,
                "max_energy": t.max_energy,
                "mineral_cost": t.mineral_cost,
                "gas_cost": t.gas_cost,
                "weapon_damage_ground": t.weapon_damage_ground,
                "weapon_damage_air": t.weapon_damage_air,
                "cooldown_ground": t.cooldown_ground,
                "cooldown_air": t.cooldown_air,
                "range_ground": t.range_ground,
                "range_air": t.range_air,
                "top_speed": t.top_speed,
                "is_flyer": t.is_flyer,
                "is_building": t.is_building,
                "is_base": t.is_base,
                "is_worker": t.is_worker,
                "is_detector": t.is_detector,
                "is_transport": t.is_transport,
                "destroy_score_override": t.destroy_score_override,
            }
            entries.append(d)
        return {"format_version": CATALOG_FORMAT_VERSION, "name": self.name, "types": entries}

    @classmethod
    def from_json(cls, data: dict) -> "Catalog":
        if data.get("format_version") != CATALOG_FORMAT_VERSION:
            raise ValidationError(
                f"unsupported catalog format_version {data.get('format_version')!r}"
            )
        try:
            types = tuple(UnitTypeStats(**entry) for entry in data["types"])
        except TypeError as exc:
            raise ValidationError(f"malformed catalog entry: {exc}") from exc
        return cls(types=types, name=data.get("name", "catalog"))

    @classmethod
    def load(cls, path: str | Path) -> "Catalog":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)


@dataclass(frozen=True)
class CombatState:
    """Two opposing armies. Input and output of every combat model."""

    army_a: tuple[Unit, ...]
    army_b: tuple[Unit, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "army_a", tuple(self.army_a))
        object.__setattr__(self, "army_b", tuple(self.army_b))
        if not self.army_a or not self.army_b:
            raise ValidationError("both armies must be non-empty")
        uids = [u.uid for u in self.army_a] + [u.uid for u in self.army_b]
        if len(uids) != len(set(uids)):
            raise ValidationError("unit uids must be globally unique across both armies")
        for u in self.army_a + self.army_b:
            if u.hp <= 0:
                raise ValidationError(f"unit {u.uid}: hp must be > 0 at combat start")
            if u.shield < 0:
                raise ValidationError(f"unit {u.uid}: shield must be >= 0")

    def swapped(self) -> "CombatState":
        return CombatState(army_a=self.army_b, army_b=self.army_a)

    @property
    def all_units(self) -> tuple[Unit, ...]:
        return self.army_a + self.army_b


def unit_to_json(u: Unit) -> dict:
    d: dict = {"uid": u.uid, "type_id": u.type_id, "hp": u.hp, "shield": u.shield}
    if u.energy:
        d["energy"] = u.energy
    if u.pos is not None:
        d["pos"] = [u.pos[0], u.pos[1]]
    return d


def unit_from_json(d: dict) -> Unit:
    pos = d.get("pos")
    return Unit(
        uid=int(d["uid"]),
        type_id=int(d["type_id"]),
        hp=float(d["hp"]),
        shield=float(d.get("shield", 0.0)),
        energy=float(d.get("energy", 0.0)),
        pos=(float(pos[0]), float(pos[1])) if pos is not None else None,
    )
