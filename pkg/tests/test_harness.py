"""Sweep harness: statistics, CSV determinism, config parsing, CLI."""

import io
import json

import pytest

from foragesim.cli import main
from foragesim.engine import ALGO_KNOWN_K, AlgorithmConfig, PHASE_LEVEL
from foragesim.harness import (
    CELL_COLUMNS,
    ExperimentSpec,
    TRIAL_COLUMNS,
    load_spec,
    read_cells_csv,
    run_cell,
    run_experiment,
    spec_from_dict,
    summarize,
    trial_row,
    write_cells_csv,
    write_trials_csv,
)
from foragesim.protocols import ConfigError
from foragesim.verify import CheckResult


def _small_spec(**overrides):
    base = dict(
        algorithm=AlgorithmConfig(ALGO_KNOWN_K),
        distances=(4, 8),
        agent_counts=(1, 4),
        trials=3,
        cap_multiplier=50,
        master_seed=5,
        mode=PHASE_LEVEL,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def test_summarize_examples():
    s = summarize([2, 4, 6])
    assert s.mean == 4 and s.censored == 0
    assert summarize([17]).ci95 is None
    s = summarize([5, 5, 5, 5])
    assert s.mean == 5 and s.ci95 == 0 and s.median == 5
    s = summarize([], censored=4)
    assert s.mean is None and s.censored == 4


def test_summarize_normal_vs_bootstrap_paths():
    wide = list(range(100, 160))
    assert summarize(wide).ci95 is not None and summarize(wide).ci95 > 0
    narrow = summarize([10, 12, 20, 14, 11])
    assert narrow.ci95 is not None and narrow.ci95 > 0


def test_run_experiment_minimal_cell():
    spec = _small_spec(distances=(4,), agent_counts=(2,), trials=1)
    rows = run_experiment(spec)
    assert len(rows) == 1
    assert rows[0].stats.censored in (0, 1)
    assert rows[0].advice_bits == 2  # "10"


def test_cells_ordering_and_competitiveness():
    spec = _small_spec()
    rows = run_experiment(spec)
    assert [(r.distance, r.k) for r in rows] == [(4, 1), (4, 4), (8, 1), (8, 4)]
    from foragesim.engine import lower_bound

    for r in rows:
        if r.stats.mean is not None:
            # the walk floor: every hitting time is at least D
            assert r.competitiveness >= r.distance / lower_bound(r.distance, r.k)


def test_csv_deterministic_bytes():
    spec = _small_spec()
    out1, out2 = io.StringIO(), io.StringIO()
    write_cells_csv(run_experiment(spec), out1)
    write_cells_csv(run_experiment(spec), out2)
    assert out1.getvalue() == out2.getvalue()
    header = out1.getvalue().splitlines()[0]
    assert header == ",".join(CELL_COLUMNS)


def test_trial_csv_roundtrip_fields():
    spec = _small_spec(distances=(4,), agent_counts=(2,), trials=2)
    summary, records = run_cell(spec, 0, 4, 2)
    buf = io.StringIO()
    write_trials_csv(records, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == ",".join(TRIAL_COLUMNS)
    assert len(lines) == 3
    row = trial_row(records[0], 0)
    assert row["seed"] == "5:0:0"
    assert row["mode"] == PHASE_LEVEL


def test_cell_rows_mode_excluded_comparison():
    # identical cell runs in the two modes agree on everything but the label
    phase = _small_spec(distances=(6,), agent_counts=(3,), trials=2, mode="phase")
    step = _small_spec(distances=(6,), agent_counts=(3,), trials=2, mode="step")
    r1 = run_experiment(phase)[0].row()
    r2 = run_experiment(step)[0].row()
    r1.pop("mode"), r2.pop("mode")
    assert r1 == r2


def test_spec_validation_errors():
    with pytest.raises(ConfigError):
        _small_spec(distances=())
    with pytest.raises(ConfigError):
        _small_spec(trials=0)
    with pytest.raises(ConfigError):
        _small_spec(mode="bogus")
    with pytest.raises(ConfigError):
        _small_spec(agent_counts=(0,))


def test_cap_overflow_guard():
    spec = _small_spec(cap_multiplier=1 << 40, distances=(1 << 12,), agent_counts=(1,))
    with pytest.raises(ConfigError):
        spec.cap_for(1 << 12, 1)


def test_spec_from_dict_strict_keys():
    good = {
        "algorithm": {"name": "uniform", "phi": {"kind": "polylog", "param": 1.5}},
        "distances": [4],
        "agent_counts": [2],
        "trials": 1,
    }
    spec = spec_from_dict(good)
    assert spec.algorithm.name == "uniform"
    with pytest.raises(ConfigError, match="spec"):
        spec_from_dict({**good, "typo_key": 1})
    with pytest.raises(ConfigError, match="algorithm.phi"):
        spec_from_dict({**good, "algorithm": {"name": "uniform", "phi": {"kind": "polylog", "oops": 1}}})
    with pytest.raises(ConfigError, match="trials"):
        spec_from_dict({k: v for k, v in good.items() if k != "trials"})


def test_spec_placement_parsing():
    base = {
        "algorithm": {"name": "known-k"},
        "distances": [4],
        "agent_counts": [2],
        "trials": 1,
        "placement": [2, -2],
    }
    spec = spec_from_dict(base)
    rows = run_experiment(spec)
    assert rows[0].stats.mean is not None
    with pytest.raises(ConfigError):
        spec_from_dict({**base, "distances": [5]})
    with pytest.raises(ConfigError):
        spec_from_dict({**base, "placement": "nowhere"})


def test_load_spec_bad_json(tmp_path):
    p = tmp_path / "spec.json"
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_spec(str(p))


# ---------------------------------------------------------------------------
# CLI.
# ---------------------------------------------------------------------------


def test_cli_simulate_and_report(tmp_path, capsys):
    out = tmp_path / "cell.csv"
    per_trial = tmp_path / "trials.csv"
    rc = main([
        "simulate", "--algorithm", "known-k", "-D", "5", "-k", "2",
        "--trials", "3", "--seed", "1", "--out", str(out),
        "--per-trial", str(per_trial),
    ])
    assert rc == 0
    with open(out) as fh:
        rows = read_cells_csv(fh)
    assert len(rows) == 1 and rows[0]["D"] == "5"
    assert per_trial.read_text().count("\n") == 4
    rc = main(["report", str(out)])
    assert rc == 0
    assert "max competitiveness" in capsys.readouterr().out


def test_cli_sweep_deterministic(tmp_path):
    cfg = {
        "algorithm": {"name": "known-k"},
        "distances": [4, 6],
        "agent_counts": [2],
        "trials": 2,
        "master_seed": 3,
    }
    cfg_path = tmp_path / "spec.json"
    cfg_path.write_text(json.dumps(cfg))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", str(cfg_path), "--out", str(out1)]) == 0
    assert main(["sweep", "--config", str(cfg_path), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_cli_verify_modes_small(capsys):
    rc = main(["verify", "modes", "--count", "8", "--seed", "77"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "PASS modes.equivalence" in out


def test_cli_exit_codes(tmp_path, capsys, monkeypatch):
    # config errors exit 2
    rc = main(["simulate", "--algorithm", "uniform", "-D", "4", "-k", "2",
               "--trials", "1"])  # uniform without --phi
    assert rc == 2
    rc = main(["sweep", "--config", str(tmp_path / "missing.json")])
    assert rc == 2
    # check failures exit 1
    import foragesim.cli as cli_mod

    monkeypatch.setitem(
        cli_mod.SUITES, "spiral", lambda: [CheckResult("spiral", "stub", False, "forced")]
    )
    assert main(["verify", "spiral"]) == 1
    assert "FAIL spiral.stub" in capsys.readouterr().out


def test_cli_env_seed(monkeypatch, tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    monkeypatch.setenv("FORAGESIM_SEED", "99")
    assert main(["simulate", "--algorithm", "known-k", "-D", "4", "-k", "1",
                 "--trials", "2", "--out", str(out_a)]) == 0
    monkeypatch.delenv("FORAGESIM_SEED")
    assert main(["simulate", "--algorithm", "known-k", "-D", "4", "-k", "1",
                 "--trials", "2", "--seed", "99", "--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_cli_coverage_smoke(capsys):
    rc = main([
        "coverage", "--algorithm", "known-k", "-k", "4",
        "--horizon-scale", "64", "--trials", "2", "--seed", "5",
    ])
    assert rc == 0
    out = capsys.readouterr().out
    assert "ring matched to k=4: 1" in out
