"""
히스토그램, 스케일링 붕괴 거리, 폭-lag 기울기 테스트
"""

import numpy as np
import numpy.testing as npt
import pytest
from pydantic import ValidationError
from scipy import stats

from scripts.generate_synthetic_prices import gbm_prices, stochastic_volatility_prices
from tools.detrend import DetrendedReturns, PriceSeries
from tools.errors import VoltailError
from tools.histogram import EmpiricalHist, bin, bootstrap_collapse_floor, collapse_metric, width_vs_lag
from tools.models import ModelParams
from tools.montecarlo import SimConfig, simulate_bo


def standardize(x):
    return (x - np.mean(x)) / np.std(x)


def test_hand_counted_example():
    hist = bin(np.array([0.0, 1.0, 2.0, 3.0, 4.0]), bins=4)
    npt.assert_array_equal(hist.edges, [0.0, 1.0, 2.0, 3.0, 4.0])
    # 최댓값 4는 마지막 구간 [3, 4]에 포함
    npt.assert_array_equal(hist.counts, [1, 1, 1, 2])
    npt.assert_allclose(hist.density, [0.2, 0.2, 0.2, 0.4])
    assert hist.index_moment() == 9.0
    assert hist.integral() == pytest.approx(1.0)
    assert hist.n_outside == 0 and hist.lag is None


def test_clip_counts_outside():
    hist = bin(np.array([-3.0, -0.5, 0.5, 3.0]), bins=2, clip=1.0)
    npt.assert_array_equal(hist.counts, [1, 1])
    assert hist.n_outside == 2 and hist.total == 4.0
    npt.assert_allclose(hist.density, [0.25, 0.25])
    assert hist.integral() == pytest.approx(0.5)


def test_density_integrates_to_one(rng):
    hist = bin(rng.standard_t(3, size=20_000), bins=100)
    assert abs(hist.integral() - 1.0) < 1e-12
    assert hist.counts.sum() == 20_000


def test_permutation_invariance(rng):
    x = rng.standard_normal(5000)
    h1 = bin(x, 40)
    h2 = bin(rng.permutation(x), 40)
    npt.assert_array_equal(h1.counts, h2.counts)
    npt.assert_array_equal(h1.edges, h2.edges)


def test_normal_data_matches_within_poisson_errors(rng):
    n = 100_000
    hist = bin(rng.standard_normal(n), bins=50, clip=4.0)
    expected = np.diff(stats.norm.cdf(hist.edges)) / hist.widths
    sigma = np.sqrt(expected * n * hist.widths) / (n * hist.widths)
    assert np.all(np.abs(hist.density - expected) <= 5.0 * sigma + 1e-12)


def test_lag_comes_from_detrended_returns(rng):
    returns = DetrendedReturns(lag=5, x=rng.standard_normal(100), a=0.0, b=0.0, width=1.0, normalized=True)
    assert bin(returns, 10).lag == 5


def test_to_frame_columns(rng):
    frame = bin(rng.standard_normal(100), 10).to_frame()
    assert list(frame.columns) == ["midpoint", "density", "count", "poisson_error"]
    assert len(frame) == 10


@pytest.mark.parametrize("data,kwargs", [
    ([1.0, 2.0, 3.0], {"bins": 1}),
    ([], {}),
    ([1.0, np.nan], {}),
    ([1.0, 2.0], {"clip": 0.0}),
    ([2.0, 2.0, 2.0], {}),
])
def test_bin_rejects_bad_input(data, kwargs):
    with pytest.raises(VoltailError):
        bin(np.array(data, dtype=float), **kwargs)


def test_histogram_validation():
    with pytest.raises(ValidationError):
        EmpiricalHist(edges=np.array([0.0, 1.0, 2.0]), counts=np.array([1, 1]), total=3.0)
    with pytest.raises(ValidationError):
        EmpiricalHist(edges=np.array([0.0, 2.0, 1.0]), counts=np.array([1, 1]), total=2.0)
    with pytest.raises(ValidationError):
        EmpiricalHist(edges=np.array([0.0, 1.0]), counts=np.array([1]), total=1.0)


def test_collapse_metric_basic_properties():
    h1 = EmpiricalHist(edges=np.array([0.0, 1.0, 2.0]), counts=np.array([1, 1]), total=2.0)
    h2 = EmpiricalHist(edges=np.array([0.0, 1.0, 2.0]), counts=np.array([2, 0]), total=2.0)
    shifted = EmpiricalHist(edges=np.array([0.5, 1.5, 2.5]), counts=np.array([1, 1]), total=2.0)
    assert collapse_metric([h1, h1]) == 0.0
    assert collapse_metric([h1, h2]) == pytest.approx(0.5)
    assert collapse_metric([h2, h1]) == collapse_metric([h1, h2])
    # 공통 지지 [0.5, 2] 위에서는 두 계단 함수가 같음
    assert collapse_metric([h1, shifted]) == 0.0
    assert collapse_metric([h1, h2, shifted]) == pytest.approx(max(
        collapse_metric([h1, h2]), collapse_metric([h2, shifted]), collapse_metric([h1, shifted])))


def test_collapse_metric_errors():
    h1 = EmpiricalHist(edges=np.array([0.0, 1.0, 2.0]), counts=np.array([1, 1]), total=2.0)
    far = EmpiricalHist(edges=np.array([5.0, 6.0, 7.0]), counts=np.array([1, 1]), total=2.0)
    with pytest.raises(VoltailError):
        collapse_metric([h1])
    with pytest.raises(VoltailError):
        collapse_metric([h1, far])


def test_bootstrap_floor_shrinks_with_sample_size(rng):
    small = bootstrap_collapse_floor(rng.standard_normal(2_000), bins=40, rng=1, clip=4.0)
    large = bootstrap_collapse_floor(rng.standard_normal(200_000), bins=40, rng=1, clip=4.0)
    assert 0.0 < large < small
    with pytest.raises(VoltailError):
        bootstrap_collapse_floor(rng.standard_normal(10), n_boot=0)


def test_zero_drift_simulation_collapses():
    params = ModelParams.from_shape("hullwhite", 2.0, theta=1.0, kappa=1.0, scheme="zero")
    paths = simulate_bo(SimConfig(params=params, horizon=25.0, paths=100_000, seed=3,
                                  record_times=[1.0, 5.0, 25.0]), workers=1)
    hists = [bin(standardize(paths.recorded[t]), 60, clip=6.0) for t in (1.0, 5.0, 25.0)]
    floor = bootstrap_collapse_floor(standardize(paths.recorded[1.0]), bins=60, rng=4, clip=6.0)
    assert collapse_metric(hists) <= 1.5 * floor


def test_ito_drift_breaks_collapse():
    params = ModelParams.from_shape("heston", 1.0, theta=1.0, kappa=1.0, scheme="ito")
    paths = simulate_bo(SimConfig(params=params, horizon=25.0, paths=100_000, seed=3,
                                  record_times=[1.0, 25.0]), workers=1)
    hists = [bin(standardize(paths.recorded[t]), 60, clip=6.0) for t in (1.0, 25.0)]
    floor = bootstrap_collapse_floor(standardize(paths.recorded[1.0]), bins=60, rng=4, clip=6.0)
    assert collapse_metric(hists) > 3.0 * floor


def test_gaussian_increments_scale_with_square_root():
    prices = PriceSeries(values=gbm_prices(5930, seed=7))
    scaling = width_vs_lag(prices, range(1, 31))
    assert scaling.slope == pytest.approx(0.5, abs=0.05)
    assert list(scaling.table["lag"]) == list(range(1, 31))
    assert scaling.fit.n_points == 30


def test_stochastic_volatility_widths_scale_with_square_root():
    params = ModelParams(gamma=0.05, theta=1e-4, kappa=0.3, kind="hullwhite", scheme="zero")
    prices = PriceSeries(values=stochastic_volatility_prices(params, 1_000_000, seed=11))
    scaling = width_vs_lag(prices, range(1, 101))
    assert scaling.slope == pytest.approx(0.5, abs=0.05)


def test_width_vs_lag_errors():
    trend = PriceSeries(values=np.exp(4.35e-4 * np.arange(1000)))
    with pytest.raises(VoltailError, match="pure trend"):
        width_vs_lag(trend, [1, 5, 25])
    with pytest.raises(VoltailError, match="3 distinct"):
        width_vs_lag(PriceSeries(values=gbm_prices(100, seed=1)), [1, 1, 5])
