"""Scoring combat models against a dataset.

Wraps every predictor behind one interface (a ModelSpec), then measures
winner-prediction accuracy, final-state similarity against the recorded
outcome, per-heterogeneity-bucket breakdowns, and wall-clock cost.
"""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

from .core import DpfTable, ltd, ltd2, project_min_dpf
from .dataset import CombatDataset, CombatRecord, EndReason
from .errors import ValidationError
from .learning import FoldSplit, learn_borda_policy, learn_dpf, train_eval_split
from .models import (
    CombatOutcome,
    Winner,
    decreasing_simulate,
    lanchester_simulate,
    sustained_simulate,
    tick_oracle_simulate,
)
from .policies import TargetSelectionPolicy
from .types import Catalog, CombatState, Unit

MODEL_KINDS = ("lanchester", "sustained", "decreasing", "oracle", "ltd", "ltd2")
REPORT_COLUMNS = (
    "model",
    "dpf_source",
    "policy",
    "accuracy",
    "similarity",
    "sim_time_s",
    "bucket_1vs1",
    "bucket_1vsN",
    "bucket_NvsN",
)


@dataclass(frozen=True)
class ModelSpec:
    """A named, fully parameterized predictor."""

    kind: str
    dpf_table: DpfTable
    policy: TargetSelectionPolicy
    catalog: Catalog
    oracle_max_frames: int = 20_000
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise ValidationError(f"unknown model kind {self.kind!r}")

    @property
    def name(self) -> str:
        return self.label or self.kind

    @property
    def predicts_final_state(self) -> bool:
        return self.kind in ("lanchester", "sustained", "decreasing", "oracle")

    def simulate(self, state: CombatState) -> CombatOutcome:
        if not self.predicts_final_state:
            raise ValidationError(f"{self.kind} is a winner predictor only")
        if self.kind == "lanchester":
            vec = project_min_dpf(self.dpf_table)
            return lanchester_simulate(state, vec, self.policy, self.catalog)
        if self.kind == "sustained":
            vec = project_min_dpf(self.dpf_table)
            return sustained_simulate(state, vec, self.policy, self.catalog)
        if self.kind == "decreasing":
            return decreasing_simulate(state, self.dpf_table, self.policy, self.catalog)
        return tick_oracle_simulate(
            state, self.dpf_table, self.policy, self.catalog,
            max_frames=self.oracle_max_frames,
        )

    def predict_winner(self, state: CombatState) -> Winner:
        if self.kind in ("ltd", "ltd2"):
            vec = project_min_dpf(self.dpf_table)
            score = ltd(state, vec) if self.kind == "ltd" else ltd2(state, vec)
            if score > 0:
                return Winner.A
            if score < 0:
                return Winner.B
            return Winner.DRAW
        return self.simulate(state).winner

    def make_winner_predictor(self):
        """Bind parameters once; returns state -> Winner."""
        if self.kind in ("ltd", "ltd2"):
            vec = project_min_dpf(self.dpf_table)
            score_fn = ltd if self.kind == "ltd" else ltd2

            def predict(state: CombatState) -> Winner:
                score = score_fn(state, vec)
                if score > 0:
                    return Winner.A
                if score < 0:
                    return Winner.B
                return Winner.DRAW

            return predict
        runner = self.make_runner()
        return lambda state: runner(state).winner

    def make_runner(self):
        """Bind parameters once; returns state -> CombatOutcome for tight loops."""
        if self.kind == "lanchester":
            vec = project_min_dpf(self.dpf_table)
            return lambda s: lanchester_simulate(s, vec, self.policy, self.catalog)
        if self.kind == "sustained":
            vec = project_min_dpf(self.dpf_table)
            return lambda s: sustained_simulate(s, vec, self.policy, self.catalog)
        if self.kind == "decreasing":
            return lambda s: decreasing_simulate(
                s, self.dpf_table, self.policy, self.catalog
            )
        if self.kind == "oracle":
            return lambda s: tick_oracle_simulate(
                s, self.dpf_table, self.policy, self.catalog,
                max_frames=self.oracle_max_frames,
            )
        raise ValidationError(f"{self.kind} has no simulation runner")


def record_truth(rec: CombatRecord) -> Winner:
    """Ground-truth winner: the side with survivors; both empty is a draw."""
    if rec.af and not rec.bf:
        return Winner.A
    if rec.bf and not rec.af:
        return Winner.B
    return Winner.DRAW


def final_state_similarity(
    initial: tuple[Unit, ...],
    predicted: tuple[Unit, ...],
    actual: tuple[Unit, ...],
) -> float:
    """Set-size similarity of predicted vs actual survivors, in [0, 1].

    Counts units by uid only; remaining hit points do not matter.
    """
    s = {u.uid for u in initial}
    if not s:
        raise ValidationError("similarity undefined for an empty initial state")
    f = {u.uid for u in actual}
    f_pred = {u.uid for u in predicted}
    if not f <= s or not f_pred <= s:
        raise ValidationError("survivors must be a subset of the initial units")
    return 1.0 - abs(len(s & f) - len(s & f_pred)) / len(s)


def bucket_by_heterogeneity(rec: CombatRecord) -> str:
    """1vs1 = both armies single-type; 1vsN = exactly one; NvsN otherwise."""
    a_single = len({u.type_id for u in rec.a0}) == 1
    b_single = len({u.type_id for u in rec.b0}) == 1
    if a_single and b_single:
        return "1vs1"
    if a_single or b_single:
        return "1vsN"
    return "NvsN"


@dataclass
class RecordOutcome:
    index: int
    bucket: str
    predicted: Winner
    actual: Winner
    correct: bool
    similarity: float | None


@dataclass
class EvalReport:
    model: str
    dpf_source: str
    policy: str
    winner_accuracy: float
    mean_similarity: float | None
    bucket_similarity: dict[str, float | None]
    total_sim_time: float
    per_record: list[RecordOutcome] = field(default_factory=list)

    def row(self) -> dict:
        return {
            "model": self.model,
            "dpf_source": self.dpf_source,
            "policy": self.policy,
            "accuracy": round(self.winner_accuracy, 6),
            "similarity": (
                round(self.mean_similarity, 6) if self.mean_similarity is not None else ""
            ),
            "sim_time_s": round(self.total_sim_time, 6),
            "bucket_1vs1": _fmt(self.bucket_similarity.get("1vs1")),
            "bucket_1vsN": _fmt(self.bucket_similarity.get("1vsN")),
            "bucket_NvsN": _fmt(self.bucket_similarity.get("NvsN")),
        }


def _fmt(value: float | None) -> str | float:
    return round(value, 6) if value is not None else ""


def _require_ground_truth(ds: CombatDataset) -> None:
    if not ds.records:
        raise ValidationError("cannot evaluate on an empty dataset")
    for i, rec in enumerate(ds.records):
        if rec.reason is not EndReason.ARMY_DESTROYED:
            raise ValidationError(
                f"record {i} has no ground-truth winner (reason {rec.reason.value})"
            )


def predict_winner_accuracy(spec: ModelSpec, ds: CombatDataset) -> float:
    """Fraction of records whose predicted winner matches the recorded one.

    Draw and stalemate predictions only count when both armies actually
    died.
    """
    _require_ground_truth(ds)
    predict = spec.make_winner_predictor()
    hits = 0
    for rec in ds.records:
        predicted = predict(rec.initial_state())
        actual = record_truth(rec)
        # a stalemate prediction never matches: the record's armies fought
        if predicted is actual:
            hits += 1
    return hits / len(ds.records)


def evaluate_model(spec: ModelSpec, ds: CombatDataset) -> EvalReport:
    """Winner accuracy, similarity, bucket breakdown, and wall time."""
    _require_ground_truth(ds)
    per_record: list[RecordOutcome] = []
    sims: list[float] = []
    bucket_sims: dict[str, list[float]] = {"1vs1": [], "1vsN": [], "NvsN": []}
    hits = 0
    total_time = 0.0
    runner = spec.make_runner() if spec.predicts_final_state else None
    for i, rec in enumerate(ds.records):
        state = rec.initial_state()
        bucket = bucket_by_heterogeneity(rec)
        actual = record_truth(rec)
        similarity = None
        if runner is not None:
            start = time.perf_counter()
            out = runner(state)
            total_time += time.perf_counter() - start
            predicted = out.winner
            if predicted is Winner.STALEMATE:
                # no combat predicted: similarity against untouched armies,
                # and the prediction never matches a fought-out record
                predicted_survivors = state.all_units
            else:
                predicted_survivors = out.survivors_a + out.survivors_b
            similarity = final_state_similarity(
                state.all_units, predicted_survivors, rec.af + rec.bf
            )
            sims.append(similarity)
            bucket_sims[bucket].append(similarity)
        else:
            start = time.perf_counter()
            predicted = spec.predict_winner(state)
            total_time += time.perf_counter() - start
        correct = predicted is actual
        hits += correct
        per_record.append(
            RecordOutcome(
                index=i,
                bucket=bucket,
                predicted=predicted,
                actual=actual,
                correct=correct,
                similarity=similarity,
            )
        )
    return EvalReport(
        model=spec.name,
        dpf_source=spec.dpf_table.provenance.value,
        policy=spec.policy.kind.value,
        winner_accuracy=hits / len(ds.records),
        mean_similarity=(sum(sims) / len(sims)) if sims else None,
        bucket_similarity={
            k: (sum(v) / len(v)) if v else None for k, v in bucket_sims.items()
        },
        total_sim_time=total_time,
        per_record=per_record,
    )


def benchmark_models(
    specs: list[ModelSpec], ds: CombatDataset, repetitions: int = 5
) -> list[dict]:
    """Median wall time per model to simulate the whole dataset.

    Runs single-threaded; reports each model's speedup ratio against the
    slowest model (the slowest gets 1.0).
    """
    if repetitions < 3:
        raise ValidationError("benchmarks need at least 3 repetitions")
    if not specs:
        return []
    states = [rec.initial_state() for rec in ds.records]
    rows = []
    for spec in specs:
        runner = spec.make_runner()
        times = []
        for _ in range(repetitions):
            start = time.perf_counter()
            for state in states:
                runner(state)
            times.append(time.perf_counter() - start)
        times.sort()
        rows.append({
            "model": spec.name,
            "dpf_source": spec.dpf_table.provenance.value,
            "policy": spec.policy.kind.value,
            "median_time_s": times[len(times) // 2],
            "records": len(states),
        })
    slowest = max(row["median_time_s"] for row in rows)
    for row in rows:
        row["ratio_vs_slowest"] = (
            slowest / row["median_time_s"] if row["median_time_s"] > 0 else float("inf")
        )
    return rows


def cross_validate(
    ds: CombatDataset,
    catalog: Catalog,
    split: FoldSplit,
    kinds: tuple[str, ...] = ("lanchester", "sustained", "decreasing"),
    policy: TargetSelectionPolicy | None = None,
) -> dict[str, EvalReport]:
    """K-fold pipeline: learn DPF (and Borda policy) per fold, score test folds.

    Returns one aggregated report per model kind, averaging accuracy and
    similarity over all test records.
    """
    merged: dict[str, list[RecordOutcome]] = {k: [] for k in kinds}
    times: dict[str, float] = {k: 0.0 for k in kinds}
    for fold in range(split.fold_count):
        train, test = train_eval_split(ds, split, fold)
        table = learn_dpf(train, catalog)
        fold_policy = policy if policy is not None else learn_borda_policy(train, catalog)
        for kind in kinds:
            spec = ModelSpec(
                kind=kind, dpf_table=table, policy=fold_policy, catalog=catalog
            )
            report = evaluate_model(spec, test)
            merged[kind].extend(report.per_record)
            times[kind] += report.total_sim_time
    reports = {}
    for kind in kinds:
        outcomes = merged[kind]
        sims = [o.similarity for o in outcomes if o.similarity is not None]
        buckets: dict[str, list[float]] = {"1vs1": [], "1vsN": [], "NvsN": []}
        for o in outcomes:
            if o.similarity is not None:
                buckets[o.bucket].append(o.similarity)
        reports[kind] = EvalReport(
            model=kind,
            dpf_source="learned",
            policy=(policy.kind.value if policy is not None else "borda_count"),
            winner_accuracy=sum(o.correct for o in outcomes) / len(outcomes),
            mean_similarity=(sum(sims) / len(sims)) if sims else None,
            bucket_similarity={
                k: (sum(v) / len(v)) if v else None for k, v in buckets.items()
            },
            total_sim_time=times[kind],
            per_record=outcomes,
        )
    return reports


# ---------------------------------------------------------------------------
# Report emission


def reports_to_csv(reports: list[EvalReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS)
    writer.writeheader()
    for report in reports:
        writer.writerow(report.row())
    return buf.getvalue()


def reports_to_json(reports: list[EvalReport], invocation: str = "") -> str:
    return json.dumps(
        {
            "format_version": 1,
            "invocation": invocation,
            "reports": [r.row() for r in reports],
        },
        indent=2,
    )


def benchmark_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(
        buf,
        fieldnames=["model", "dpf_source", "policy", "median_time_s", "records",
                    "ratio_vs_slowest"],
    )
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
