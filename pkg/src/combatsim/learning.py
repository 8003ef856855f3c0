"""Learning combat-model parameters from a training dataset.

The effective DPF matrix is estimated by crediting each killed unit's
starting health uniformly to the enemy units that could have attacked
it, against the time elapsed since the victim's army last lost a unit.
The target-selection policy is learned by Borda-counting first-kill
orders of defending types, split by attacker composition.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import DpfProvenance, DpfTable, attackability_mask
from .dataset import CombatDataset, CombatRecord
from .errors import ValidationError
from .policies import (
    ArmyComposition,
    BordaScores,
    TargetSelectionPolicy,
    army_composition,
    borda_policy,
)
from .types import Catalog, Unit

MODEL_FILE_FORMAT_VERSION = 1


@dataclass
class DpfAccumulators:
    """Running damage and attack-time sums per (attacker type, victim type)."""

    damage_to_type: np.ndarray
    time_attacking_type: np.ndarray

    @classmethod
    def zeros(cls, k: int) -> "DpfAccumulators":
        return cls(damage_to_type=np.zeros((k, k)), time_attacking_type=np.zeros((k, k)))

    def merge(self, other: "DpfAccumulators") -> "DpfAccumulators":
        return DpfAccumulators(
            damage_to_type=self.damage_to_type + other.damage_to_type,
            time_attacking_type=self.time_attacking_type + other.time_attacking_type,
        )


def _accumulate_record(
    acc: DpfAccumulators,
    rec: CombatRecord,
    catalog: Catalog,
    include_passive: bool,
) -> int:
    """Credit one combat's kills into the accumulators; returns skipped kills."""
    passive = set(rec.passive)

    def eligible(army: tuple[Unit, ...]) -> list[Unit]:
        if include_passive:
            return list(army)
        return [u for u in army if u.uid not in passive]

    armies = {0: rec.a0, 1: rec.b0}
    attackers = {0: eligible(rec.a0), 1: eligible(rec.b0)}
    owner_of = {u.uid: p for p, army in armies.items() for u in army}
    unit_of = {u.uid: u for army in armies.values() for u in army}
    last_kill_frame = {0: rec.t0, 1: rec.t0}
    skipped = 0
    for frame, uid in rec.kills:
        victim = unit_of[uid]
        owner = owner_of[uid]
        enemies = [
            u
            for u in attackers[1 - owner]
            if catalog[u.type_id].can_attack_type(catalog[victim.type_id])
        ]
        elapsed = max(frame - last_kill_frame[owner], 0)
        last_kill_frame[owner] = frame
        if not enemies:
            skipped += 1  # nobody could have dealt the damage
            continue
        # damage is always credited; simultaneous kills add zero elapsed
        # time, which telescopes correctly over the owner's kill sequence
        d_split = victim.health / len(enemies)
        for u in enemies:
            acc.damage_to_type[u.type_id, victim.type_id] += d_split
            acc.time_attacking_type[u.type_id, victim.type_id] += elapsed
    return skipped


@dataclass(frozen=True)
class DpfLearnReport:
    """Coverage summary of a learn_dpf run."""

    uncovered_pairs: tuple[tuple[int, int], ...]  # attackable but never observed
    skipped_kills: int
    records_used: int


def learn_dpf_detailed(
    ds: CombatDataset,
    catalog: Catalog,
    include_passive_in_counts: bool = False,
) -> tuple[DpfTable, DpfAccumulators, DpfLearnReport]:
    if not ds.records:
        raise ValidationError("cannot learn from an empty dataset")
    ds.validate_against(catalog)
    acc = DpfAccumulators.zeros(catalog.k)
    skipped = 0
    for rec in ds.records:
        skipped += _accumulate_record(acc, rec, catalog, include_passive_in_counts)
    mask = attackability_mask(catalog)
    time = acc.time_attacking_type
    per_pair = np.divide(
        acc.damage_to_type, time, out=np.zeros((catalog.k, catalog.k)), where=time > 0
    )
    per_pair = np.where(mask, per_pair, 0.0)
    ground_cols = np.array([not t.is_flyer for t in catalog.types])

    def domain_vector(cols: np.ndarray) -> np.ndarray:
        vec = np.zeros(catalog.k)
        for i in range(catalog.k):
            observed = per_pair[i, cols & mask[i]]
            observed = observed[observed > 0]
            if observed.size:
                vec[i] = observed.min()
        return vec

    table = DpfTable(
        per_pair=per_pair,
        per_unit_ground=domain_vector(ground_cols),
        per_unit_air=domain_vector(~ground_cols),
        provenance=DpfProvenance.LEARNED,
    )
    uncovered = tuple(
        (i, j)
        for i in range(catalog.k)
        for j in range(catalog.k)
        if mask[i, j] and acc.time_attacking_type[i, j] == 0
    )
    report = DpfLearnReport(
        uncovered_pairs=uncovered,
        skipped_kills=skipped,
        records_used=len(ds.records),
    )
    return table, acc, report


def learn_dpf(
    ds: CombatDataset, catalog: Catalog, include_passive_in_counts: bool = False
) -> DpfTable:
    """Estimate the effective DPF matrix from army-destroyed combats."""
    table, _acc, _report = learn_dpf_detailed(ds, catalog, include_passive_in_counts)
    return table


# ---------------------------------------------------------------------------
# Borda-count target selection


@dataclass
class BordaTally:
    """Points and appearance counts per type, one pair per attacker composition."""

    points: dict[ArmyComposition, np.ndarray]
    appearances: dict[ArmyComposition, np.ndarray]

    @classmethod
    def zeros(cls, k: int) -> "BordaTally":
        return cls(
            points={c: np.zeros(k) for c in ArmyComposition},
            appearances={c: np.zeros(k) for c in ArmyComposition},
        )

    def add_combat(
        self,
        defenders: tuple[Unit, ...],
        kills_of_defender: list[int],
        attacker_comp: ArmyComposition,
    ) -> None:
        """Score one defending army: first-killed type gets n-1 points."""
        present = sorted({u.type_id for u in defenders})
        n = len(present)
        first_kill_rank: dict[int, int] = {}
        for type_id in kills_of_defender:
            if type_id not in first_kill_rank:
                first_kill_rank[type_id] = len(first_kill_rank)
        for type_id in present:
            rank = first_kill_rank.get(type_id)
            pts = float(n - 1 - rank) if rank is not None else 0.0
            self.points[attacker_comp][type_id] += pts
            self.appearances[attacker_comp][type_id] += 1

    def averages(self) -> BordaScores:
        def avg(comp: ArmyComposition) -> np.ndarray:
            apps = self.appearances[comp]
            return np.where(apps > 0, self.points[comp] / np.where(apps > 0, apps, 1.0), 0.0)

        return BordaScores(
            ground=avg(ArmyComposition.GROUND),
            air=avg(ArmyComposition.AIR),
            mixed=avg(ArmyComposition.MIXED),
        )


def learn_borda_policy(ds: CombatDataset, catalog: Catalog) -> TargetSelectionPolicy:
    """Learn a Borda-count target policy from kill orders in the dataset."""
    if not ds.records:
        raise ValidationError("cannot learn from an empty dataset")
    if not any(rec.kills for rec in ds.records):
        raise ValidationError("dataset has no kills to rank")
    tally = BordaTally.zeros(catalog.k)
    for rec in ds.records:
        owner_of = {u.uid: 0 for u in rec.a0}
        owner_of.update({u.uid: 1 for u in rec.b0})
        type_of = {u.uid: u.type_id for u in rec.a0 + rec.b0}
        for defenders, own, enemies in ((rec.a0, 0, rec.b0), (rec.b0, 1, rec.a0)):
            killed_types = [
                type_of[uid] for _f, uid in rec.kills if owner_of[uid] == own
            ]
            tally.add_combat(defenders, killed_types, army_composition(enemies, catalog))
    return borda_policy(tally.averages())


# ---------------------------------------------------------------------------
# Cross-validation folds


@dataclass(frozen=True)
class FoldSplit:
    fold_count: int
    assignments: tuple[int, ...]  # record index -> fold id
    seed: int


def make_folds(ds: CombatDataset, fold_count: int, seed: int) -> FoldSplit:
    """Deterministic shuffled partition into folds of near-equal size."""
    if fold_count < 2:
        raise ValidationError("fold_count must be >= 2")
    if len(ds.records) < fold_count:
        raise ValidationError("dataset smaller than fold count")
    indices = list(range(len(ds.records)))
    random.Random(seed).shuffle(indices)
    assignments = [0] * len(indices)
    for position, record_index in enumerate(indices):
        assignments[record_index] = position % fold_count
    return FoldSplit(fold_count=fold_count, assignments=tuple(assignments), seed=seed)


def train_eval_split(
    ds: CombatDataset, split: FoldSplit, fold: int
) -> tuple[CombatDataset, CombatDataset]:
    if not 0 <= fold < split.fold_count:
        raise ValidationError(f"fold {fold} out of range")
    if len(split.assignments) != len(ds.records):
        raise ValidationError("fold split does not match dataset size")
    train, test = [], []
    for rec, assignment in zip(ds.records, split.assignments):
        (test if assignment == fold else train).append(rec)
    return (
        CombatDataset(records=tuple(train), catalog_ref=ds.catalog_ref, source=ds.source),
        CombatDataset(records=tuple(test), catalog_ref=ds.catalog_ref, source=ds.source),
    )


# ---------------------------------------------------------------------------
# Learned-parameter model files


def save_model_file(
    path: str | Path,
    catalog_ref: str,
    dpf_table: DpfTable,
    borda: BordaScores | None = None,
    metadata: dict | None = None,
) -> None:
    payload = {
        "format_version": MODEL_FILE_FORMAT_VERSION,
        "catalog_ref": catalog_ref,
        "dpf": dpf_table.to_json(),
        "borda": borda.to_json() if borda is not None else None,
        "metadata": metadata or {},
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_model_file(path: str | Path) -> tuple[str, DpfTable, BordaScores | None, dict]:
    with open(path) as fh:
        data = json.load(fh)
    if data.get("format_version") != MODEL_FILE_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported model file format_version {data.get('format_version')!r}"
        )
    borda = BordaScores.from_json(data["borda"]) if data.get("borda") else None
    return (
        data["catalog_ref"],
        DpfTable.from_json(data["dpf"]),
        borda,
        data.get("metadata", {}),
    )
