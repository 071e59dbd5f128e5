"""
Monte Carlo 시뮬레이션 테스트
"""

import logging
import math

import numpy as np
import numpy.testing as npt
import pytest
from pydantic import ValidationError
from scipy import stats

from tools.bo_pdf import TsallisParams, tsallis_distribution
from tools.errors import SimulationError, VoltailError
from tools.models import ModelParams
from tools.montecarlo import SimConfig, bo_discrepancy, simulate_bo, simulate_joint
from tools.stationary import StationaryDist


def hull_white(gamma, kappa, theta=1.0, scheme="zero"):
    return ModelParams(gamma=gamma, theta=theta, kappa=kappa, kind="hullwhite", scheme=scheme)


def test_same_seed_is_bitwise_identical_across_workers():
    cfg = SimConfig(params=hull_white(1.0, 1.0), dt=0.01, horizon=1.0, paths=3000,
                    seed=42, record_times=[0.5, 1.0], block_size=500)
    single = simulate_joint(cfg, workers=1)
    threaded = simulate_joint(cfg, workers=4)
    npt.assert_array_equal(single.terminal, threaded.terminal)
    npt.assert_array_equal(single.recorded[0.5], threaded.recorded[0.5])
    npt.assert_array_equal(single.v_terminal, threaded.v_terminal)

    other = simulate_joint(cfg.model_copy(update={"seed": 43}), workers=1)
    assert not np.array_equal(single.terminal, other.terminal)


def test_block_size_is_part_of_reproducibility_key():
    cfg = SimConfig(params=hull_white(1.0, 1.0), dt=0.01, horizon=1.0, paths=20000, seed=42, block_size=500)
    small_blocks = simulate_joint(cfg, workers=2)
    npt.assert_array_equal(small_blocks.terminal, simulate_joint(cfg, workers=1).terminal)

    large_blocks = simulate_joint(cfg.model_copy(update={"block_size": 4096}), workers=2)
    assert not np.array_equal(small_blocks.terminal, large_blocks.terminal)
    assert stats.ks_2samp(small_blocks.terminal, large_blocks.terminal).pvalue > 1e-3


def test_recorded_times_match_terminal():
    cfg = SimConfig(params=hull_white(1.0, 1.0), dt=0.01, horizon=2.0, paths=200, seed=1, record_times=[2.0])
    paths = simulate_joint(cfg, workers=1)
    npt.assert_array_equal(paths.recorded[2.0], paths.terminal)
    assert paths.count == 200


def test_variance_relaxes_to_stationary_law():
    params = hull_white(1.0, 1.0)
    cfg = SimConfig(params=params, dt=0.005, horizon=10.0, paths=20000, seed=5, v0=1.0)
    paths = simulate_joint(cfg, workers=1)
    target = StationaryDist.from_params(params).to_scipy()
    assert stats.kstest(paths.v_terminal, target.cdf).statistic < 0.02


def test_heston_stays_nonnegative():
    params = ModelParams(gamma=1.0, theta=1.0, kappa=2.0, kind="heston", scheme="ito")
    cfg = SimConfig(params=params, dt=0.01, horizon=2.0, paths=2000, seed=3, store_stride=10)
    paths = simulate_joint(cfg, workers=1)
    assert np.all(paths.v_terminal >= 0)
    assert np.all(paths.v_paths >= 0)
    assert paths.x_paths.shape == (2000, 20)
    npt.assert_allclose(paths.stored_times[[0, -1]], [0.1, 2.0])


def test_bo_simulation_moments():
    params = hull_white(2.0, 1.0, theta=0.8, scheme="ito")
    cfg = SimConfig(params=params, horizon=5.0, paths=200_000, seed=9, record_times=[1.0, 5.0])
    paths = simulate_bo(cfg, workers=1)
    x1, x5 = paths.recorded[1.0], paths.recorded[5.0]
    ev = float(np.mean(paths.v_terminal))
    # Ito: 평균 −θt/2, v를 고정한 브라운 운동이므로 Cov(x₁, x₅) = E[v]
    assert np.mean(x5) == pytest.approx(-0.5 * 0.8 * 5.0, abs=0.05)
    assert np.cov(x1, x5)[0, 1] == pytest.approx(ev + np.var(0.5 * paths.v_terminal) * 5.0, rel=0.05)


def test_bo_simulation_zero_drift_variance():
    params = hull_white(1.0, 1.0, theta=1.2)
    cfg = SimConfig(params=params, horizon=4.0, paths=200_000, seed=11, record_times=[4.0])
    x = simulate_bo(cfg, workers=1).recorded[4.0]
    assert np.mean(x) == pytest.approx(0.0, abs=0.03)
    assert np.var(x) == pytest.approx(1.2 * 4.0, rel=0.05)


def ks_critical_95(n):
    return 1.358 / math.sqrt(n)


def test_discrepancy_small_when_volatility_relaxes_fast():
    # γt = 50, β = 2γ/κ² = 10
    cfg = SimConfig(params=hull_white(5.0, 1.0), dt=0.01, horizon=10.0, paths=100_000, seed=1)
    table = bo_discrepancy(cfg, [10.0], workers=1)
    assert float(table["gamma_t"].iloc[0]) == pytest.approx(50.0)
    assert float(table["ks_distance"].iloc[0]) < 0.01


def test_discrepancy_with_frozen_volatility_is_gaussian_distance():
    # γt = 0.01, v0 = θ 고정: x는 거의 N(0, θt)이므로 BO 법칙과의 거리는 가우시안과 Student-t 사이 거리
    beta, gamma = 2.5, 0.01
    cfg = SimConfig(params=hull_white(gamma, math.sqrt(2.0 * gamma / beta)), dt=0.01, horizon=1.0,
                    paths=100_000, seed=1, v0=1.0)
    ks = float(bo_discrepancy(cfg, [1.0], workers=1)["ks_distance"].iloc[0])

    grid = np.linspace(-6.0, 6.0, 4001)
    student = tsallis_distribution(TsallisParams(beta=beta, theta=1.0, t=1.0))
    gaussian_gap = float(np.max(np.abs(stats.norm.cdf(grid) - student.cdf(grid))))
    assert ks > 5.0 * ks_critical_95(cfg.paths)
    assert ks == pytest.approx(gaussian_gap, abs=0.006)


def test_heston_variance_relaxes_to_gamma_law():
    params = ModelParams(gamma=1.0, theta=1.0, kappa=1.0, kind="heston", scheme="ito")
    cfg = SimConfig(params=params, dt=0.005, horizon=10.0, paths=20000, seed=13, v0=1.0)
    paths = simulate_joint(cfg, workers=1)
    alpha = 2.0 * params.gamma * params.theta / params.kappa ** 2
    target = stats.gamma(a=alpha, scale=params.theta / alpha)
    assert stats.kstest(paths.v_terminal, target.cdf).statistic < 0.02


def test_halving_dt_keeps_moments_within_sampling_error():
    params = hull_white(1.0, 0.5)
    coarse = simulate_joint(SimConfig(params=params, dt=0.02, horizon=1.0, paths=100_000, seed=31), workers=1).terminal
    fine = simulate_joint(SimConfig(params=params, dt=0.01, horizon=1.0, paths=100_000, seed=32), workers=1).terminal

    def moment_errors(x):
        centered = (x - x.mean()) ** 2
        return math.sqrt(np.var(x) / x.size), math.sqrt(np.var(centered) / x.size)

    (se_mean_c, se_var_c), (se_mean_f, se_var_f) = moment_errors(coarse), moment_errors(fine)
    assert abs(coarse.mean() - fine.mean()) < 4.0 * math.hypot(se_mean_c, se_mean_f)
    assert abs(np.var(coarse) - np.var(fine)) < 4.0 * math.hypot(se_var_c, se_var_f)


def test_zero_drift_uncorrelated_returns_are_symmetric():
    params = hull_white(1.0, 0.5)
    x = simulate_joint(SimConfig(params=params, dt=0.01, horizon=1.0, paths=100_000, seed=41), workers=1).terminal
    batch_skews = stats.skew(x.reshape(50, -1), axis=1)
    standard_error = float(np.std(batch_skews, ddof=1)) / math.sqrt(batch_skews.size)
    assert abs(float(stats.skew(x))) < 4.0 * standard_error


def test_deterministic_volatility_joint_is_gaussian():
    params = ModelParams(gamma=5.0, theta=0.5, kappa=0.0, kind="heston", scheme="ito")
    cfg = SimConfig(params=params, dt=0.05, horizon=2.0, paths=100_000, seed=51, v0=0.5)
    paths = simulate_joint(cfg, workers=1)
    x = paths.terminal
    npt.assert_allclose(paths.v_terminal, 0.5)
    variance = 0.5 * 2.0
    assert abs(np.mean(x) + 0.5 * variance) < 4.0 * math.sqrt(variance / x.size)
    assert abs(np.var(x, ddof=1) - variance) < 4.0 * variance * math.sqrt(2.0 / (x.size - 1))


def test_bo_simulation_heston_ito_loss_skew():
    # x = −vT/2 + √(vT)·Z, v ~ Gamma(α, θ/α): 3차 중심 모멘트 −(T³/8)κ₃(v) − (3T²/2)Var(v)
    params = ModelParams.from_shape("heston", 2.0, theta=1.0, kappa=1.0, scheme="ito")
    x = simulate_bo(SimConfig(params=params, horizon=1.0, paths=200_000, seed=61, record_times=[1.0]),
                    workers=1).recorded[1.0]
    var_v, kappa3_v = 0.5, 0.5
    third = -kappa3_v / 8.0 - 1.5 * var_v
    expected_skew = third / (1.0 + var_v / 4.0) ** 1.5
    assert stats.skew(x) < 0
    assert stats.skew(x) == pytest.approx(expected_skew, rel=0.1)


def test_bo_simulation_matches_tsallis_histogram():
    params = ModelParams.from_shape("hullwhite", 2.0, theta=1.0, kappa=1.0, scheme="zero")
    x = simulate_bo(SimConfig(params=params, horizon=1.0, paths=1_000_000, seed=71, record_times=[1.0]),
                    workers=1).recorded[1.0]
    edges = np.linspace(-5.0, 5.0, 61)
    observed, _ = np.histogram(x, bins=edges)
    expected = x.size * np.diff(tsallis_distribution(TsallisParams(beta=2.0, theta=1.0, t=1.0)).cdf(edges))
    chi2_per_bin = float(np.sum((observed - expected) ** 2 / expected)) / observed.size
    assert chi2_per_bin < 2.0



def test_discrepancy_warns_on_correlation(caplog):
    cfg = SimConfig(params=hull_white(1.0, 1.0), dt=0.01, horizon=1.0, paths=1000, rho=0.5, seed=2)
    with caplog.at_level(logging.WARNING, logger="tools.montecarlo"):
        table = bo_discrepancy(cfg, [1.0], workers=1)
    assert "rho=0.5" in caplog.text
    assert list(table.columns) == ["lag", "gamma_t", "ks_distance"]


def test_discrepancy_argument_checks():
    cfg = SimConfig(params=hull_white(1.0, 1.0), dt=0.01, horizon=1.0, paths=500, seed=2)
    with pytest.raises(VoltailError, match="paths"):
        bo_discrepancy(cfg, [1.0])
    cfg = cfg.model_copy(update={"paths": 2000})
    with pytest.raises(VoltailError, match="horizon"):
        bo_discrepancy(cfg, [5.0])
    with pytest.raises(VoltailError):
        bo_discrepancy(cfg, [])


def test_non_finite_step_raises():
    params = hull_white(1.0, 1000.0)
    cfg = SimConfig(params=params, dt=1.0, horizon=5.0, paths=10, seed=0, v0=1.0)
    with np.errstate(all="ignore"):
        with pytest.raises(SimulationError) as info:
            simulate_joint(cfg, workers=1)
    assert info.value.step >= 1
    assert 0 <= info.value.path < 10


def test_config_validation():
    params = hull_white(1.0, 1.0)
    with pytest.raises(ValidationError):
        SimConfig(params=params, horizon=1.0, record_times=[2.0])
    with pytest.raises(ValidationError):
        SimConfig(params=params, v0=-1.0)
    with pytest.raises(ValidationError):
        SimConfig(params=params, rho=1.5)
    with pytest.raises(ValidationError):
        SimConfig(params=params, dt=0.1, horizon=0.01)
    assert SimConfig(params=params, dt=0.01, horizon=1.0).n_steps == 100
    assert math.isclose(SimConfig(params=params).dt, 0.01)
