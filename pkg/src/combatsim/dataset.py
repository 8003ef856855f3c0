"""Combat records: dataset format, trace-based combat detection, filtering.

A trace is a frame-ordered stream of unit events (spawn, death, attack
orders, damage, movement). The detector scans it once, opening a combat
whenever a military unit turns aggressive or exposed, tracking the
two-hop in-range closure of participants, and closing on army
destruction, peace, reinforcement, or game end.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .types import Catalog, CombatState, Unit, unit_from_json, unit_to_json

TRACE_FORMAT_VERSION = 1
DATASET_FORMAT_VERSION = 1
DEFAULT_PEACE_WINDOW = 144  # frames: 6 seconds of game play


class EventKind(enum.Enum):
    SPAWN = "spawn"
    DEATH = "death"
    ORDER_ATTACK = "order_attack"
    DAMAGE = "damage"
    MOVE = "move"
    GAME_END = "game_end"


class EndReason(enum.Enum):
    ARMY_DESTROYED = "army_destroyed"
    PEACE = "peace"
    REINFORCEMENT = "reinforcement"
    GAME_END = "game_end"


@dataclass(frozen=True, slots=True)
class TraceEvent:
    frame: int
    kind: EventKind
    uid: int | None = None
    player: int | None = None
    type_id: int | None = None
    pos: tuple[float, float] | None = None
    target_uid: int | None = None
    amount: float | None = None

    def to_json(self) -> dict:
        d: dict = {"frame": self.frame, "kind": self.kind.value}
        for name in ("uid", "player", "type_id", "target_uid", "amount"):
            value = getattr(self, name)
            if value is not None:
                d[name] = value
        if self.pos is not None:
            d["pos"] = [self.pos[0], self.pos[1]]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "TraceEvent":
        pos = d.get("pos")
        return cls(
            frame=int(d["frame"]),
            kind=EventKind(d["kind"]),
            uid=d.get("uid"),
            player=d.get("player"),
            type_id=d.get("type_id"),
            pos=(float(pos[0]), float(pos[1])) if pos is not None else None,
            target_uid=d.get("target_uid"),
            amount=d.get("amount"),
        )


@dataclass(frozen=True)
class CombatRecord:
    """One extracted combat: start/end armies, kill log, end reason."""

    t0: int
    tf: int
    reason: EndReason
    a0: tuple[Unit, ...]
    b0: tuple[Unit, ...]
    af: tuple[Unit, ...]
    bf: tuple[Unit, ...]
    kills: tuple[tuple[int, int], ...]  # (frame, uid), frame-ordered
    passive: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.t0 > self.tf:
            raise ValidationError("combat record with t0 > tf")
        start_uids = {u.uid for u in self.a0} | {u.uid for u in self.b0}
        for _frame, uid in self.kills:
            if uid not in start_uids:
                raise ValidationError(f"kill of unknown uid {uid}")
        if not {u.uid for u in self.af} <= {u.uid for u in self.a0}:
            raise ValidationError("af is not a subset of a0")
        if not {u.uid for u in self.bf} <= {u.uid for u in self.b0}:
            raise ValidationError("bf is not a subset of b0")
        if self.reason is EndReason.ARMY_DESTROYED and self.af and self.bf:
            raise ValidationError("army-destroyed record with both armies alive")

    def initial_state(self) -> CombatState:
        return CombatState(army_a=self.a0, army_b=self.b0)

    @property
    def duration(self) -> int:
        return self.tf - self.t0

    def to_json(self) -> dict:
        return {
            "t0": self.t0,
            "tf": self.tf,
            "reason": self.reason.value,
            "a0": [unit_to_json(u) for u in self.a0],
            "b0": [unit_to_json(u) for u in self.b0],
            "af": [unit_to_json(u) for u in self.af],
            "bf": [unit_to_json(u) for u in self.bf],
            "kills": [[f, uid] for f, uid in self.kills],
            "passive": list(self.passive),
        }

    @classmethod
    def from_json(cls, d: dict) -> "CombatRecord":
        return cls(
            t0=int(d["t0"]),
            tf=int(d["tf"]),
            reason=EndReason(d["reason"]),
            a0=tuple(unit_from_json(x) for x in d["a0"]),
            b0=tuple(unit_from_json(x) for x in d["b0"]),
            af=tuple(unit_from_json(x) for x in d["af"]),
            bf=tuple(unit_from_json(x) for x in d["bf"]),
            kills=tuple((int(f), int(uid)) for f, uid in d["kills"]),
            passive=tuple(int(u) for u in d.get("passive", ())),
        )


@dataclass(frozen=True)
class CombatDataset:
    records: tuple[CombatRecord, ...]
    catalog_ref: str
    source: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def validate_against(self, catalog: Catalog) -> None:
        for i, rec in enumerate(self.records):
            for u in rec.a0 + rec.b0:
                if not 0 <= u.type_id < catalog.k:
                    raise ValidationError(f"record {i}: unresolvable type {u.type_id}")

    def to_json(self) -> dict:
        return {
            "format_version": DATASET_FORMAT_VERSION,
            "catalog_ref": self.catalog_ref,
            "source": self.source,
            "records": [r.to_json() for r in self.records],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CombatDataset":
        if data.get("format_version") != DATASET_FORMAT_VERSION:
            raise ValidationError(
                f"unsupported dataset format_version {data.get('format_version')!r}"
            )
        return cls(
            records=tuple(CombatRecord.from_json(r) for r in data["records"]),
            catalog_ref=data["catalog_ref"],
            source=data.get("source", ""),
        )

    @classmethod
    def load(cls, path: str | Path) -> "CombatDataset":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)


# ---------------------------------------------------------------------------
# Trace files: newline-delimited JSON with a header line.


def write_trace(path: str | Path, events: list[TraceEvent], catalog_ref: str) -> None:
    with open(path, "w") as fh:
        header = {
            "format_version": TRACE_FORMAT_VERSION,
            "kind": "trace_header",
            "catalog_ref": catalog_ref,
        }
        fh.write(json.dumps(header) + "\n")
        for ev in events:
            fh.write(json.dumps(ev.to_json()) + "\n")


def read_trace(path: str | Path) -> tuple[list[TraceEvent], str]:
    with open(path) as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad trace header: {exc}") from exc
        if header.get("kind") != "trace_header":
            raise ValidationError("trace file missing header line")
        if header.get("format_version") != TRACE_FORMAT_VERSION:
            raise ValidationError(
                f"unsupported trace format_version {header.get('format_version')!r}"
            )
        events = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(TraceEvent.from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValidationError(f"bad trace event at line {lineno}: {exc}") from exc
    return events, header.get("catalog_ref", "")


# ---------------------------------------------------------------------------
# Combat detection


@dataclass
class _LiveUnit:
    uid: int
    player: int
    type_id: int
    pos: tuple[float, float]
    hp: float
    shield: float
    attack_target: int | None = None  # outstanding attack order

    def snapshot(self) -> Unit:
        return Unit(
            uid=self.uid,
            type_id=self.type_id,
            hp=self.hp,
            shield=self.shield,
            pos=self.pos,
        )


@dataclass
class _OpenCombat:
    t0: int
    participants: set[int]
    a0: list[Unit]
    b0: list[Unit]
    last_attack: int
    kills: list[tuple[int, int]] = field(default_factory=list)
    attacked: set[int] = field(default_factory=set)  # participants that fought
    dead: set[int] = field(default_factory=set)


class _Detector:
    """Single-pass stateful scan over one trace."""

    def __init__(self, catalog: Catalog, peace_window: int):
        self.catalog = catalog
        self.window = peace_window
        self.world: dict[int, _LiveUnit] = {}
        self.open: list[_OpenCombat] = []
        self.records: list[CombatRecord] = []
        self.in_combat: dict[int, _OpenCombat] = {}

    # -- geometry

    def _in_range(self, u: _LiveUnit) -> set[int]:
        """Units within u's attack range, u itself included."""
        ut = self.catalog[u.type_id]
        result = {u.uid}
        for v in self.world.values():
            if v.uid == u.uid:
                continue
            vt = self.catalog[v.type_id]
            if not ut.can_attack_type(vt):
                continue
            rng = ut.attack_range_vs(vt)
            if math.dist(u.pos, v.pos) <= rng:
                result.add(v.uid)
        return result

    def _closure(self, trigger: _LiveUnit) -> set[int]:
        """Two-hop in-range closure around the trigger unit."""
        first = self._in_range(trigger)
        d = set(first) | {trigger.uid}
        for uid in first:
            unit = self.world.get(uid)
            if unit is not None:
                d |= self._in_range(unit)
        return {uid for uid in d if uid not in self.in_combat}

    def _is_aggressive(self, u: _LiveUnit) -> bool:
        return u.attack_target is not None

    def _is_exposed(self, u: _LiveUnit) -> bool:
        for v in self.world.values():
            if v.player == u.player or not self._is_aggressive(v):
                continue
            vt = self.catalog[v.type_id]
            ut = self.catalog[u.type_id]
            if vt.can_attack_type(ut) and math.dist(v.pos, u.pos) <= vt.attack_range_vs(ut):
                return True
        return False

    # -- combat lifecycle

    def _open_combat(self, trigger: _LiveUnit, frame: int) -> None:
        members = self._closure(trigger)
        a0, b0 = [], []
        for uid in sorted(members):
            unit = self.world.get(uid)
            if unit is None:
                continue
            (a0 if unit.player == 0 else b0).append(unit.snapshot())
        if not a0 or not b0:
            return  # one-sided closure: nothing to fight
        combat = _OpenCombat(
            t0=frame,
            participants={u.uid for u in a0} | {u.uid for u in b0},
            a0=a0,
            b0=b0,
            last_attack=frame,
        )
        self.open.append(combat)
        for uid in combat.participants:
            self.in_combat[uid] = combat
            member = self.world.get(uid)
            if member is not None and member.attack_target is not None:
                combat.attacked.add(uid)

    def _close(self, combat: _OpenCombat, tf: int, reason: EndReason) -> None:
        af, bf = [], []
        a0_uids = {u.uid for u in combat.a0}
        for uid in sorted(combat.participants - combat.dead):
            unit = self.world.get(uid)
            if unit is None:
                continue
            (af if uid in a0_uids else bf).append(unit.snapshot())
        passive = tuple(
            uid for uid in sorted(combat.participants) if uid not in combat.attacked
        )
        self.records.append(
            CombatRecord(
                t0=combat.t0,
                tf=tf,
                reason=reason,
                a0=tuple(combat.a0),
                b0=tuple(combat.b0),
                af=tuple(af),
                bf=tuple(bf),
                kills=tuple(combat.kills),
                passive=passive,
            )
        )
        self.open.remove(combat)
        for uid in combat.participants:
            if self.in_combat.get(uid) is combat:
                del self.in_combat[uid]

    def _check_peace(self, now: int) -> None:
        for combat in list(self.open):
            if now - combat.last_attack >= self.window:
                self._close(combat, combat.last_attack + self.window, EndReason.PEACE)

    def _check_destroyed(self, combat: _OpenCombat, frame: int) -> None:
        a_alive = any(u.uid not in combat.dead for u in combat.a0)
        b_alive = any(u.uid not in combat.dead for u in combat.b0)
        if not a_alive or not b_alive:
            self._close(combat, frame, EndReason.ARMY_DESTROYED)

    def _participation(self, uid: int, frame: int, combat: _OpenCombat) -> None:
        combat.attacked.add(uid)
        combat.last_attack = frame

    def _maybe_reinforce(self, outsider_uid: int, combat: _OpenCombat, frame: int) -> None:
        """An outside unit began participating: close and let re-triggering reopen."""
        if outsider_uid in combat.participants:
            return
        if outsider_uid in self.in_combat:
            return  # busy in its own combat; merging is out of scope
        if frame <= combat.t0:
            return  # the battle is only just starting; not a reinforcement
        self._close(combat, frame, EndReason.REINFORCEMENT)

    # -- event application

    def apply(self, ev: TraceEvent) -> None:
        frame = ev.frame
        self._check_peace(frame)
        kind = ev.kind
        if kind is EventKind.SPAWN:
            if ev.uid in self.world:
                raise ValidationError(f"frame {frame}: duplicate spawn of uid {ev.uid}")
            if ev.type_id is None or not 0 <= ev.type_id < self.catalog.k:
                raise ValidationError(f"frame {frame}: spawn with bad type {ev.type_id}")
            if ev.player not in (0, 1):
                raise ValidationError(f"frame {frame}: spawn with bad player {ev.player}")
            stats = self.catalog[ev.type_id]
            self.world[ev.uid] = _LiveUnit(
                uid=ev.uid,
                player=ev.player,
                type_id=ev.type_id,
                pos=ev.pos or (0.0, 0.0),
                hp=stats.max_hp,
                shield=stats.max_shield,
            )
        elif kind is EventKind.MOVE:
            unit = self._require(ev.uid, frame)
            unit.pos = ev.pos or unit.pos
            unit.attack_target = None  # move orders cancel aggression
        elif kind is EventKind.ORDER_ATTACK:
            unit = self._require(ev.uid, frame)
            unit.attack_target = ev.target_uid
            combat = self.in_combat.get(ev.uid)
            if combat is not None:
                self._participation(ev.uid, frame, combat)
            elif ev.target_uid is not None:
                target_combat = self.in_combat.get(ev.target_uid)
                if target_combat is not None:
                    self._maybe_reinforce(ev.uid, target_combat, frame)
        elif kind is EventKind.DAMAGE:
            dealer = self._require(ev.uid, frame)
            victim = self._require(ev.target_uid, frame)
            amount = ev.amount or 0.0
            absorbed = min(victim.shield, amount)
            victim.shield -= absorbed
            victim.hp -= amount - absorbed
            dealer_combat = self.in_combat.get(dealer.uid)
            victim_combat = self.in_combat.get(victim.uid)
            if victim_combat is not None and dealer_combat is not victim_combat:
                self._maybe_reinforce(dealer.uid, victim_combat, frame)
            elif dealer_combat is not None and victim_combat is not dealer_combat:
                self._maybe_reinforce(victim.uid, dealer_combat, frame)
            combat = self.in_combat.get(dealer.uid)
            if combat is not None and combat is self.in_combat.get(victim.uid):
                self._participation(dealer.uid, frame, combat)
        elif kind is EventKind.DEATH:
            unit = self._require(ev.uid, frame)
            combat = self.in_combat.get(ev.uid)
            if combat is not None:
                combat.kills.append((frame, ev.uid))
                combat.dead.add(ev.uid)
            del self.world[ev.uid]
            for other in self.world.values():
                if other.attack_target == ev.uid:
                    other.attack_target = None
            if combat is not None:
                self._check_destroyed(combat, frame)
        elif kind is EventKind.GAME_END:
            for combat in list(self.open):
                self._close(combat, frame, EndReason.GAME_END)
            self.world.clear()
            self.in_combat.clear()

    def _require(self, uid: int | None, frame: int) -> _LiveUnit:
        unit = self.world.get(uid) if uid is not None else None
        if unit is None:
            raise ValidationError(f"frame {frame}: event references unknown uid {uid}")
        return unit

    def _scan_triggers(self, frame: int) -> None:
        for unit in list(self.world.values()):
            if unit.uid in self.in_combat:
                continue
            if not self.catalog[unit.type_id].is_military:
                continue
            if self._is_aggressive(unit) or self._is_exposed(unit):
                self._open_combat(unit, frame)

    def finish(self, last_frame: int) -> None:
        self._check_peace(last_frame)
        for combat in list(self.open):
            self._close(combat, last_frame, EndReason.GAME_END)


def detect_combats(
    trace: list[TraceEvent],
    catalog: Catalog,
    peace_window: int = DEFAULT_PEACE_WINDOW,
) -> list[CombatRecord]:
    """Extract combat records from a frame-ordered unit-event trace.

    A combat opens when a military unit is aggressive (attack order) or
    exposed (inside an aggressive enemy's attack range) and not already
    in a combat; its participants are the two-hop in-range closure around
    the trigger. It closes when an army is destroyed, when no participant
    has attacked for ``peace_window`` frames, when an outside unit starts
    participating (reinforcement), or at game end.
    """
    if not trace:
        return []
    detector = _Detector(catalog, peace_window)
    last = trace[0].frame
    for ev in trace:
        if ev.frame < last:
            raise ValidationError(f"frame {ev.frame}: events out of order")
        if ev.frame > last:
            # combats open at frame boundaries, once every co-aggressor
            # of the previous frame has been seen
            detector._scan_triggers(last)
            last = ev.frame
        detector.apply(ev)
    detector._scan_triggers(last)
    detector.finish(last)
    return detector.records


# ---------------------------------------------------------------------------
# Filtering and statistics


def default_excluded_types(catalog: Catalog) -> tuple[int, ...]:
    """Mine-like types excluded from training by default."""
    return tuple(t.type_id for t in catalog.types if "mine" in t.name.lower())


def filter_for_training(
    ds: CombatDataset,
    catalog: Catalog,
    excluded_types: tuple[int, ...] | None = None,
) -> CombatDataset:
    """Keep clean army-destroyed combats where both sides fought.

    Drops records that did not end with an army destroyed, records
    containing excluded types (mine-like by default), and records where
    one side was entirely passive.
    """
    if excluded_types is None:
        excluded_types = default_excluded_types(catalog)
    banned = set(excluded_types)
    kept = []
    for rec in ds.records:
        if rec.reason is not EndReason.ARMY_DESTROYED:
            continue
        if any(u.type_id in banned for u in rec.a0 + rec.b0):
            continue
        passive = set(rec.passive)
        if {u.uid for u in rec.a0} <= passive or {u.uid for u in rec.b0} <= passive:
            continue
        kept.append(rec)
    return CombatDataset(records=tuple(kept), catalog_ref=ds.catalog_ref, source=ds.source)


@dataclass(frozen=True)
class DatasetStats:
    n_records: int
    by_reason: dict[str, int]
    length_mean: float
    length_min: int
    length_max: int
    units_mean: float
    units_min: int
    units_max: int
    types_mean: float
    types_min: int
    types_max: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def dataset_stats(ds: CombatDataset) -> DatasetStats:
    if not ds.records:
        return DatasetStats(0, {}, 0.0, 0, 0, 0.0, 0, 0, 0.0, 0, 0)
    by_reason: dict[str, int] = {}
    lengths, units, types = [], [], []
    for rec in ds.records:
        by_reason[rec.reason.value] = by_reason.get(rec.reason.value, 0) + 1
        lengths.append(rec.duration)
        units.append(len(rec.a0) + len(rec.b0))
        types.append(len({u.type_id for u in rec.a0 + rec.b0}))
    n = len(ds.records)
    return DatasetStats(
        n_records=n,
        by_reason=by_reason,
        length_mean=sum(lengths) / n,
        length_min=min(lengths),
        length_max=max(lengths),
        units_mean=sum(units) / n,
        units_min=min(units),
        units_max=max(units),
        types_mean=sum(types) / n,
        types_min=min(types),
        types_max=max(types),
    )
