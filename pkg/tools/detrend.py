"""
로그 수익률 구성과 선형 디트렌딩
lag-t 로그 수익률 ξ_i(t) = ln(s_{i+t}/s_i), 최소제곱 선형 추세 제거, 단위 분산 정규화
"""

import logging
import math
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from tools.errors import VoltailError

logger = logging.getLogger(__name__)

TRADING_DAYS_PER_YEAR = 5930 / 30


class PriceSeries(BaseModel):
    """양의 가격 시계열 (선택적 라벨: 날짜 등)"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray
    labels: Optional[List[str]] = None

    @field_validator("values", mode="before")
    @classmethod
    def _check_values(cls, v):
        arr = np.asarray(v, dtype=float)
        if arr.ndim != 1:
            raise ValueError("prices must be one-dimensional")
        if arr.size < 3:
            raise ValueError(f"need at least 3 prices, got {arr.size}")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ValueError("prices must be finite and positive")
        return arr

    def __len__(self) -> int:
        return int(self.values.size)


class LagReturns(BaseModel):
    """lag-t 로그 수익률"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    lag: int = Field(..., ge=1)
    xi: np.ndarray
    overlapping: bool = True

    @property
    def count(self) -> int:
        return int(self.xi.size)


class DetrendedReturns(BaseModel):
    """
    디트렌딩(+정규화)된 수익률

    x: normalized=False이면 y_i = ξ_i − a − b·i, True이면 x_i = y_i·√N/√Σy²
    width: 정규화 전 폭 w_t = √(Σy²/N)
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    lag: int
    x: np.ndarray
    a: float
    b: float
    width: float
    normalized: bool = False

    @property
    def count(self) -> int:
        return int(self.x.size)


def lag_returns(prices: PriceSeries, t: int, overlapping: bool = True) -> LagReturns:
    """
    lag-t 로그 수익률

    Args:
        prices: 가격 시계열
        t: 시간 지연 (1 ≤ t ≤ len−2)
        overlapping: True면 시작 인덱스마다 하나 (stride 1), False면 겹치지 않는 구간

    Returns:
        LagReturns (overlapping이면 count = len − t)
    """
    n = len(prices)
    if not (1 <= t <= n - 2):
        raise VoltailError(f"lag must lie in [1, {n - 2}], got {t}")
    log_s = np.log(prices.values)
    if overlapping:
        xi = log_s[t:] - log_s[:-t]
    else:
        xi = np.diff(log_s[::t])
    return LagReturns(lag=t, xi=xi, overlapping=overlapping)


def linear_detrend(xi: Union[LagReturns, DetrendedReturns]) -> DetrendedReturns:
    """
    최소제곱 선형 추세 제거 (인덱스 i = 1..N)

    b = 6/(N−1)·(⟨iξ⟩ − ⟨ξ⟩),  a = ⟨ξ⟩ − b(N+1)/2
    ⟨ξ⟩ = Σξ/N,  ⟨iξ⟩ = Σiξ/Σi = 2Σiξ/(N(N+1))

    Args:
        xi: LagReturns 또는 (멱등성 확인용) DetrendedReturns

    Returns:
        정규화 전 DetrendedReturns (Σy = Σi·y = 0)
    """
    values = xi.xi if isinstance(xi, LagReturns) else xi.x
    n = values.size
    if n < 3:
        raise VoltailError(f"linear_detrend needs at least 3 values, got {n}")

    index = np.arange(1, n + 1, dtype=float)
    mean_xi = float(np.mean(values))
    mean_ixi = 2.0 * float(np.dot(index, values)) / (n * (n + 1.0))
    b = 6.0 / (n - 1.0) * (mean_ixi - mean_xi)
    a = mean_xi - b * (n + 1.0) / 2.0

    y = values - a - b * index
    width = math.sqrt(float(np.dot(y, y)) / n)
    return DetrendedReturns(lag=xi.lag, x=y, a=a, b=b, width=width, normalized=False)


def normalize(y: DetrendedReturns) -> DetrendedReturns:
    """
    단위 분산 정규화 x_i = y_i·√N/√(Σy²)

    Raises:
        VoltailError: 모든 y가 0 (상수 시계열)
    """
    sum_sq = float(np.dot(y.x, y.x))
    if sum_sq <= 0.0:
        raise VoltailError("cannot normalize an all-zero series (constant returns carry no distribution)")
    x = y.x * math.sqrt(y.count) / math.sqrt(sum_sq)
    return y.model_copy(update={"x": x, "normalized": True})


def detrended_returns(prices: PriceSeries, t: int, overlapping: bool = True) -> DetrendedReturns:
    """lag_returns → linear_detrend → normalize"""
    return normalize(linear_detrend(lag_returns(prices, t, overlapping)))


def trend_summary(prices: PriceSeries, lags: Sequence[int], overlapping: bool = True) -> pd.DataFrame:
    """
    lag별 추세와 폭

    Args:
        prices: 가격 시계열
        lags: 시간 지연 목록

    Returns:
        DataFrame (lag, count, a, b, mean, width)
    """
    rows = []
    for t in lags:
        xi = lag_returns(prices, int(t), overlapping)
        fitted = linear_detrend(xi)
        rows.append({
            "lag": int(t),
            "count": xi.count,
            "a": fitted.a,
            "b": fitted.b,
            "mean": float(np.mean(xi.xi)),
            "width": fitted.width,
        })
    return pd.DataFrame(rows, columns=["lag", "count", "a", "b", "mean", "width"])


def estimate_drift(summary: pd.DataFrame) -> float:
    """평균 추세 ξ̄(t) = μt 의 원점 통과 기울기 μ"""
    lags = summary["lag"].to_numpy(dtype=float)
    means = summary["mean"].to_numpy(dtype=float)
    return float(np.dot(lags, means) / np.dot(lags, lags))


def yearly_earnings(mu: float, days_per_year: float = TRADING_DAYS_PER_YEAR) -> float:
    """일별 드리프트 μ의 연간 수익률 exp(μ·days) − 1"""
    return math.expm1(mu * days_per_year)
