"""
Volatility Simulation Skill / CLI 테스트
"""

import json
import logging

import pandas as pd

from app import main

HULL_WHITE = ["--model", "hullwhite", "--scheme", "zero", "--gamma", "1", "--theta", "1", "--kappa", "1"]


def simulate(out, *extra):
    return main(["simulate", *HULL_WHITE, "--lags", "1,2", "--dt", "0.01", "--paths", "2000",
                 "--seed", "17", "--out", str(out), *extra])


def test_same_seed_gives_identical_files(tmp_path, monkeypatch):
    monkeypatch.delenv("VOLTAIL_SEED", raising=False)
    assert simulate(tmp_path / "a") == 0
    assert simulate(tmp_path / "b", "--workers", "2") == 0
    for name in ("samples.tsv", "sim_hist_t1.tsv", "sim_hist_t2.tsv", "simulation.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    samples = pd.read_csv(tmp_path / "a" / "samples.tsv", sep="\t")
    assert list(samples.columns) == ["path", "v_terminal", "x_t1", "x_t2"]
    summary = json.loads((tmp_path / "a" / "simulation.json").read_text(encoding="utf-8"))
    assert summary["mode"] == "joint" and summary["paths"] == 2000


def test_bo_only_mode(tmp_path):
    assert simulate(tmp_path, "--bo-only") == 0
    assert json.loads((tmp_path / "simulation.json").read_text(encoding="utf-8"))["mode"] == "bo"


def test_compare_tsallis_case(tmp_path):
    # β = 2γ/κ² = 2, θ = 1
    assert main(["simulate", *HULL_WHITE, "--lags", "1", "--paths", "20000", "--dt", "0.01",
                 "--seed", "3", "--compare", "--out", str(tmp_path)]) == 0
    table = pd.read_csv(tmp_path / "compare.tsv", sep="\t")
    assert list(table.columns) == ["lag", "gamma_t", "ks_distance", "ks_bo_sim", "ks_critical_95"]
    row = table.iloc[0]
    assert row["ks_bo_sim"] < 1.2 * row["ks_critical_95"]
    assert row["gamma_t"] == 1.0


def test_correlated_noise_warns(tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        assert simulate(tmp_path, "--rho", "0.5", "--compare") == 0
    assert "rho=0.5" in caplog.text


def test_invalid_parameters_fail_before_compute(tmp_path, capsys):
    assert main(["simulate", "--model", "hullwhite", "--gamma", "-1", "--theta", "1", "--kappa", "1",
                 "--out", str(tmp_path)]) == 1
    assert "invalid parameters" in capsys.readouterr().err
    assert main(["simulate", "--out", str(tmp_path)]) == 1
    assert not (tmp_path / "samples.tsv").exists()
