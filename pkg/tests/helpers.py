"""Construction shorthands shared by the test modules."""

from combatsim.types import CombatState, Unit, UnitTypeStats


def mk_type(type_id, name, **kw):
    return UnitTypeStats(type_id=type_id, name=name, **kw)


def mk_unit(uid, type_id, hp, shield=0.0, pos=None) -> Unit:
    return Unit(uid=uid, type_id=type_id, hp=hp, shield=shield, pos=pos)


def mk_state(army_a, army_b) -> CombatState:
    return CombatState(army_a=tuple(army_a), army_b=tuple(army_b))
