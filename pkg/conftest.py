"""
공용 pytest fixture
"""

import numpy as np
import pytest

from scripts.generate_synthetic_prices import gbm_prices, save_prices
from tools.bo_pdf import TsallisParams, tsallis_distribution
from tools.histogram import bin

ROUND_TRIP_BETA = 0.861
ROUND_TRIP_THETA = 1.03


@pytest.fixture
def rng():
    return np.random.default_rng(20061231)


@pytest.fixture
def gbm_csv(tmp_path):
    """5930개 GBM 일별 종가 CSV (date, close)"""
    return save_prices(gbm_prices(5930, seed=7), tmp_path / "gbm.csv")


@pytest.fixture(scope="session")
def tsallis_samples():
    """Tsallis(β=0.861, θ=1.03, t=1) 샘플 10⁶개"""
    dist = tsallis_distribution(TsallisParams(beta=ROUND_TRIP_BETA, theta=ROUND_TRIP_THETA, t=1.0))
    return dist.rvs(size=1_000_000, random_state=np.random.default_rng(861))


@pytest.fixture(scope="session")
def tsallis_hist(tsallis_samples):
    """B=100, 대칭 범위 ±8 히스토그램"""
    return bin(tsallis_samples, 100, clip=8.0)
