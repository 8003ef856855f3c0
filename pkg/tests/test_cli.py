import json

import pytest

from combatsim.cli import DEFAULT_CATALOG, main
from combatsim.dataset import CombatDataset
from combatsim.learning import load_model_file
from combatsim.types import Catalog


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    """Shared artifacts for the CLI pipeline: dataset, model file, state."""
    root = tmp_path_factory.mktemp("cli")
    ds_path = root / "ds.json"
    assert main([
        "gen-synthetic", "--combats", "120", "--seed", "5",
        "--out", str(ds_path),
    ]) == 0
    model_path = root / "model.json"
    assert main([
        "learn", "--dataset", str(ds_path), "--out", str(model_path),
    ]) == 0
    return {"root": root, "ds": ds_path, "model": model_path}


def test_gen_synthetic_dataset_loadable(work):
    ds = CombatDataset.load(work["ds"])
    assert len(ds) == 120
    catalog = Catalog.load(DEFAULT_CATALOG)
    ds.validate_against(catalog)


def test_gen_synthetic_deterministic(work, tmp_path):
    again = tmp_path / "again.json"
    assert main([
        "gen-synthetic", "--combats", "120", "--seed", "5", "--out", str(again),
    ]) == 0
    assert again.read_text() == work["ds"].read_text()


def test_learn_writes_model_file(work):
    ref, table, borda, meta = load_model_file(work["model"])
    assert ref == "starcraft_basic"
    assert borda is not None
    assert meta["records_used"] > 0


def test_simulate_decreasing_golden_fixture(tmp_path, capsys):
    # the two-vs-one fixture: B wins with its second unit at 10 hp, t = 5
    catalog_path = tmp_path / "cat.json"
    catalog_path.write_text(json.dumps({
        "format_version": 1,
        "name": "fixture",
        "types": [
            {"type_id": 0, "name": "hitter", "max_hp": 40,
             "weapon_damage_ground": 10, "cooldown_ground": 1},
            {"type_id": 1, "name": "pair", "max_hp": 30,
             "weapon_damage_ground": 5, "cooldown_ground": 1},
        ],
    }))
    state_path = tmp_path / "state.json"
    state_path.write_text(json.dumps({
        "format_version": 1,
        "catalog_ref": "fixture",
        "army_a": [{"uid": 1, "type_id": 0, "hp": 40}],
        "army_b": [{"uid": 2, "type_id": 1, "hp": 30},
                   {"uid": 3, "type_id": 1, "hp": 30}],
    }))
    rc = main([
        "simulate", "--model", "decreasing",
        "--catalog", str(catalog_path), "--state", str(state_path),
    ])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["winner"] == "b"
    assert out["duration_frames"] == pytest.approx(5.0)
    assert out["survivors_b"] == [{"uid": 3, "type_id": 1, "hp": 10.0, "shield": 0.0}]


def test_evaluate_oracle_self_consistency(work, tmp_path):
    out = tmp_path / "report.csv"
    rc = main([
        "evaluate", "--dataset", str(work["ds"]), "--models", "oracle",
        "--format", "csv", "--out", str(out),
    ])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("model,dpf_source,policy,accuracy")
    row = lines[1].split(",")
    assert row[0] == "oracle"
    assert float(row[3]) == 1.0  # accuracy on its own data
    assert float(row[4]) == 1.0  # similarity


def test_evaluate_cross_validation(work, tmp_path):
    out = tmp_path / "cv.csv"
    rc = main([
        "evaluate", "--dataset", str(work["ds"]), "--folds", "5",
        "--models", "decreasing", "--format", "csv", "--out", str(out),
    ])
    assert rc == 0
    rows = out.read_text().strip().splitlines()
    assert len(rows) == 2
    assert float(rows[1].split(",")[3]) > 0.5


def test_bench_reports_ratio(work, tmp_path):
    out = tmp_path / "bench.csv"
    rc = main([
        "bench", "--dataset", str(work["ds"]), "--models", "lanchester,decreasing",
        "--repetitions", "3", "--format", "csv", "--out", str(out),
    ])
    assert rc == 0
    rows = out.read_text().strip().splitlines()
    assert rows[0].startswith("model,")
    assert len(rows) == 3


def test_stats_output(work, capsys):
    assert main(["stats", "--dataset", str(work["ds"])]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["stats"]["n_records"] == 120


def test_detect_round_trip(tmp_path, capsys):
    trace_path = tmp_path / "trace.ndjson"
    assert main([
        "gen-synthetic", "--combats", "5", "--seed", "9", "--kind", "traces",
        "--out", str(trace_path),
    ]) == 0
    capsys.readouterr()
    ds_path = tmp_path / "detected.json"
    assert main([
        "detect", "--trace", str(trace_path), "--out", str(ds_path),
    ]) == 0
    ds = CombatDataset.load(ds_path)
    assert len(ds) == 5


def test_play_deterministic_summary(tmp_path):
    map_path = DEFAULT_CATALOG.parent.parent / "maps" / "hexring6.json"
    scenario = DEFAULT_CATALOG.parent.parent / "scenarios" / "skirmish.json"
    args = [
        "play", "--map", str(map_path), "--scenario", str(scenario),
        "--a", "random", "--b", "random", "--games", "2", "--seed", "7",
        "--max-frames", "4000", "--format", "csv",
    ]
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    assert first.read_text() == second.read_text()
    header = first.read_text().splitlines()[0]
    assert header == "configuration,games,avg_eval,win_pct,loss_pct,avg_length"


def test_validation_error_exit_code(tmp_path, capsys):
    missing = tmp_path / "nope.json"
    rc = main(["stats", "--dataset", str(missing)])
    assert rc == 3  # unreadable file is a runtime error
    err = capsys.readouterr().err
    assert json.loads(err)["error"] == "runtime"


def test_validation_error_json_on_stderr(tmp_path, capsys):
    bad_trace = tmp_path / "bad.ndjson"
    bad_trace.write_text('{"kind": "not_a_header"}\n')
    rc = main(["detect", "--trace", str(bad_trace)])
    assert rc == 2
    err = capsys.readouterr().err
    payload = json.loads(err)
    assert payload["error"] == "validation"
