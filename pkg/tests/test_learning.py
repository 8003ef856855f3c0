import random

import numpy as np
import pytest

from combatsim.core import DpfProvenance, attackability_mask, static_dpf
from combatsim.dataset import CombatDataset, CombatRecord, EndReason
from combatsim.errors import ValidationError
from combatsim.learning import (
    learn_borda_policy,
    learn_dpf,
    learn_dpf_detailed,
    load_model_file,
    make_folds,
    save_model_file,
    train_eval_split,
)
from combatsim.policies import ArmyComposition, destroy_score_policy
from combatsim.synthetic import SyntheticConfig, generate_dataset
from combatsim.types import Catalog

from helpers import mk_type, mk_unit


def ds_of(records, ref="test"):
    return CombatDataset(records=tuple(records), catalog_ref=ref)


def test_learn_dpf_hand_credit():
    # one combat: a 100 hp ground victim killed at t=50 by two gunners
    cat = Catalog(types=(
        mk_type(0, "gunner", max_hp=50, weapon_damage_ground=5, cooldown_ground=10),
        mk_type(1, "victim", max_hp=100, weapon_damage_ground=2, cooldown_ground=10),
    ))
    rec = CombatRecord(
        t0=0, tf=50, reason=EndReason.ARMY_DESTROYED,
        a0=(mk_unit(1, 1, 100),),
        b0=(mk_unit(2, 0, 50), mk_unit(3, 0, 50)),
        af=(), bf=(mk_unit(2, 0, 50), mk_unit(3, 0, 50)),
        kills=((50, 1),),
    )
    table, acc, report = learn_dpf_detailed(ds_of([rec]), cat)
    # each gunner is credited 50 damage over 50 frames
    assert acc.damage_to_type[0, 1] == pytest.approx(100.0)
    assert acc.time_attacking_type[0, 1] == pytest.approx(100.0)
    assert table.per_pair[0, 1] == pytest.approx(1.0)
    assert table.provenance is DpfProvenance.LEARNED
    assert report.skipped_kills == 0


def air_victim_catalog():
    return Catalog(types=(
        mk_type(0, "aa_only", max_hp=50, weapon_damage_air=6, cooldown_air=10),
        mk_type(1, "dual", max_hp=50, weapon_damage_air=6, cooldown_air=10,
                weapon_damage_ground=6, cooldown_ground=10),
        mk_type(2, "ground_only", max_hp=50, weapon_damage_ground=6, cooldown_ground=10),
        mk_type(3, "flyer", max_hp=80, weapon_damage_ground=4, cooldown_ground=10,
                is_flyer=True),
    ))


def test_learn_dpf_air_victim_split():
    # enemy army: 1 air-only, 1 dual, 3 ground-only; only two can hit a flyer
    cat = air_victim_catalog()
    enemies = (
        mk_unit(10, 0, 50), mk_unit(11, 1, 50),
        mk_unit(12, 2, 50), mk_unit(13, 2, 50), mk_unit(14, 2, 50),
    )
    rec = CombatRecord(
        t0=0, tf=40, reason=EndReason.ARMY_DESTROYED,
        a0=(mk_unit(1, 3, 80),), b0=enemies,
        af=(), bf=enemies,
        kills=((40, 1),),
    )
    _table, acc, _report = learn_dpf_detailed(ds_of([rec]), cat)
    # d_split = 80 / 2; ground-only units get nothing
    assert acc.damage_to_type[0, 3] == pytest.approx(40.0)
    assert acc.damage_to_type[1, 3] == pytest.approx(40.0)
    assert acc.damage_to_type[2, 3] == 0.0


def test_learn_dpf_rejects_empty():
    with pytest.raises(ValidationError):
        learn_dpf(ds_of([]), air_victim_catalog())


def test_learn_dpf_unattackable_pairs_stay_zero(catalog):
    cfg = SyntheticConfig(n_combats=80, seed=5)
    ds = generate_dataset(catalog, cfg)
    table = learn_dpf(ds, catalog)
    mask = attackability_mask(catalog)
    assert (table.per_pair[~mask] == 0).all()
    assert (table.per_pair >= 0).all()


def test_learn_dpf_order_invariant(catalog):
    ds = generate_dataset(catalog, SyntheticConfig(n_combats=40, seed=9))
    shuffled = list(ds.records)
    random.Random(3).shuffle(shuffled)
    a = learn_dpf(ds, catalog)
    b = learn_dpf(ds_of(shuffled, ds.catalog_ref), catalog)
    np.testing.assert_allclose(a.per_pair, b.per_pair)


def test_learn_dpf_doubling_invariant(catalog):
    ds = generate_dataset(catalog, SyntheticConfig(n_combats=40, seed=9))
    doubled = ds_of(ds.records + ds.records, ds.catalog_ref)
    a = learn_dpf(ds, catalog)
    b = learn_dpf(doubled, catalog)
    np.testing.assert_allclose(a.per_pair, b.per_pair)


def test_learn_dpf_duels_recover_static_smoke(catalog):
    # small-scale identifiability check; the acceptance suite runs it at scale
    ds = generate_dataset(
        catalog, SyntheticConfig(n_combats=300, seed=21, profile="duels",
                                 targeting="spread")
    )
    learned = learn_dpf(ds, catalog)
    truth = static_dpf(catalog)
    _table, acc, _report = learn_dpf_detailed(ds, catalog)
    well_sampled = acc.time_attacking_type >= 1000
    assert well_sampled.sum() >= 4
    rel_err = np.abs(learned.per_pair - truth.per_pair)[well_sampled] / truth.per_pair[well_sampled]
    assert rel_err.max() < 0.10


# ---------------------------------------------------------------------------
# Borda learning


def borda_catalog():
    return Catalog(types=(
        mk_type(0, "marine", max_hp=40, mineral_cost=50,
                weapon_damage_ground=6, cooldown_ground=15),
        mk_type(1, "tank", max_hp=150, mineral_cost=150, gas_cost=100,
                weapon_damage_ground=30, cooldown_ground=37),
        mk_type(2, "worker", max_hp=60, mineral_cost=50,
                weapon_damage_ground=5, cooldown_ground=15),
        mk_type(3, "raider", max_hp=80, mineral_cost=80,
                weapon_damage_ground=10, cooldown_ground=12),
    ))


def test_learn_borda_worked_example():
    # defenders tank+marine+worker, killed in that order: points 2, 1, 0;
    # the attackers are a distinct type so their (kill-free) defensive
    # tally does not dilute the defender scores
    cat = borda_catalog()
    defenders = (mk_unit(1, 1, 150), mk_unit(2, 0, 40), mk_unit(3, 2, 60))
    attackers = (mk_unit(10, 3, 80), mk_unit(11, 3, 80))
    rec = CombatRecord(
        t0=0, tf=90, reason=EndReason.ARMY_DESTROYED,
        a0=defenders, b0=attackers,
        af=(), bf=attackers,
        kills=((10, 1), (50, 2), (90, 3)),
    )
    policy = learn_borda_policy(ds_of([rec]), cat)
    scores = policy.borda.for_composition(ArmyComposition.GROUND)
    assert scores[1] == pytest.approx(2.0)  # tank died first
    assert scores[0] == pytest.approx(1.0)
    assert scores[2] == pytest.approx(0.0)


def test_learn_borda_single_type_army_scores_zero():
    cat = borda_catalog()
    defenders = (mk_unit(1, 0, 40), mk_unit(2, 0, 40))
    attackers = (mk_unit(10, 3, 80),)
    rec = CombatRecord(
        t0=0, tf=30, reason=EndReason.ARMY_DESTROYED,
        a0=defenders, b0=attackers, af=(), bf=attackers,
        kills=((10, 1), (30, 2)),
    )
    policy = learn_borda_policy(ds_of([rec]), cat)
    assert policy.borda.ground[0] == pytest.approx(0.0)  # n-1 = 0


def test_learn_borda_requires_kills():
    cat = borda_catalog()
    defenders = (mk_unit(1, 0, 40),)
    attackers = (mk_unit(10, 1, 150),)
    rec = CombatRecord(
        t0=0, tf=30, reason=EndReason.PEACE,
        a0=defenders, b0=attackers, af=defenders, bf=attackers, kills=(),
    )
    with pytest.raises(ValidationError):
        learn_borda_policy(ds_of([rec]), cat)


def test_learn_borda_recovers_priority_order_smoke(catalog):
    # generated with destroy-score targeting; the learned ground ranking
    # must reproduce the destroy-score ranking of observed ground types
    ds = generate_dataset(
        catalog, SyntheticConfig(n_combats=400, seed=13, profile="mixed")
    )
    policy = learn_borda_policy(ds, catalog)
    scores = policy.borda.mixed + policy.borda.ground + policy.borda.air
    # tank (id 4) costs the most of the common ground types: 2*150+4*100
    assert scores[4] > scores[0]  # tank preferred over grunt


def test_borda_scores_bounded(catalog):
    ds = generate_dataset(catalog, SyntheticConfig(n_combats=100, seed=3))
    policy = learn_borda_policy(ds, catalog)
    for comp in ArmyComposition:
        vec = policy.borda.for_composition(comp)
        assert (vec >= 0).all()
        assert (vec <= catalog.k - 1).all()


def test_borda_doubling_invariant(catalog):
    ds = generate_dataset(catalog, SyntheticConfig(n_combats=60, seed=8))
    doubled = ds_of(ds.records + ds.records, ds.catalog_ref)
    a = learn_borda_policy(ds, catalog)
    b = learn_borda_policy(doubled, catalog)
    for comp in ArmyComposition:
        np.testing.assert_allclose(
            a.borda.for_composition(comp), b.borda.for_composition(comp)
        )


# ---------------------------------------------------------------------------
# Folds


def fold_dataset(n=10):
    records = []
    for i in range(n):
        a0 = (mk_unit(10 * i + 1, 0, 40),)
        b0 = (mk_unit(10 * i + 2, 0, 40),)
        records.append(CombatRecord(
            t0=0, tf=10, reason=EndReason.ARMY_DESTROYED,
            a0=a0, b0=b0, af=a0, bf=(), kills=((10, 10 * i + 2),),
        ))
    return ds_of(records)


def test_folds_partition_ten_by_ten():
    ds = fold_dataset(10)
    split = make_folds(ds, 10, seed=1)
    for fold in range(10):
        _train, test = train_eval_split(ds, split, fold)
        assert len(test) == 1


def test_folds_deterministic():
    ds = fold_dataset(25)
    assert make_folds(ds, 10, seed=4) == make_folds(ds, 10, seed=4)


def test_folds_union_covers_dataset():
    ds = fold_dataset(23)
    split = make_folds(ds, 5, seed=2)
    seen = []
    for fold in range(5):
        train, test = train_eval_split(ds, split, fold)
        assert len(train) + len(test) == len(ds)
        seen.extend(test.records)
    assert sorted(r.a0[0].uid for r in seen) == sorted(r.a0[0].uid for r in ds.records)
    sizes = [len(train_eval_split(ds, split, f)[1]) for f in range(5)]
    assert max(sizes) - min(sizes) <= 1


def test_folds_validation():
    ds = fold_dataset(5)
    with pytest.raises(ValidationError):
        make_folds(ds, 1, seed=0)
    with pytest.raises(ValidationError):
        make_folds(ds, 6, seed=0)
    split = make_folds(ds, 5, seed=0)
    with pytest.raises(ValidationError):
        train_eval_split(ds, split, 5)


def test_model_file_round_trip(tmp_path, catalog):
    ds = generate_dataset(catalog, SyntheticConfig(n_combats=50, seed=17))
    table = learn_dpf(ds, catalog)
    policy = learn_borda_policy(ds, catalog)
    path = tmp_path / "model.json"
    save_model_file(path, catalog.name, table, policy.borda, {"note": "test"})
    ref, loaded_table, loaded_borda, meta = load_model_file(path)
    assert ref == catalog.name
    np.testing.assert_allclose(loaded_table.per_pair, table.per_pair)
    np.testing.assert_allclose(loaded_borda.mixed, policy.borda.mixed)
    assert meta == {"note": "test"}
