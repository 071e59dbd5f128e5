"""
수익률 히스토그램과 스케일링 진단
정규화된 수익률의 구간화, lag 간 스케일링 붕괴(collapse) 거리, 폭-lag 로그-로그 기울기
"""

import logging
from itertools import combinations
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tools.detrend import DetrendedReturns, PriceSeries, trend_summary
from tools.errors import VoltailError
from tools.fit import LogLogSlope, loglog_slope

logger = logging.getLogger(__name__)

# 이 값 이하의 폭은 반올림 잔차로 보고 0으로 취급
WIDTH_FLOOR = 1e-12

DataLike = Union[DetrendedReturns, np.ndarray, Sequence[float]]


class EmpiricalHist(BaseModel):
    """
    경험적 분포 히스토그램

    edges: X_0 < X_1 < ... < X_B
    counts: 구간 [X_k, X_{k+1}) 의 개수 P_k (마지막 구간은 오른쪽 끝 포함)
    total: 전체 데이터 수 N (clip 범위 밖 n_outside 포함)
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    edges: np.ndarray
    counts: np.ndarray
    total: float = Field(..., gt=0)
    n_outside: int = Field(0, ge=0)
    lag: Optional[int] = None

    @model_validator(mode="after")
    def _check_shape(self) -> "EmpiricalHist":
        edges = np.asarray(self.edges, dtype=float)
        counts = np.asarray(self.counts)
        if edges.ndim != 1 or counts.ndim != 1 or edges.size != counts.size + 1:
            raise ValueError("edges must have exactly one more entry than counts")
        if counts.size < 2:
            raise ValueError("histogram needs at least 2 bins")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("edges must be strictly increasing")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        if not np.isclose(float(counts.sum()) + self.n_outside, self.total, rtol=1e-9, atol=0.0):
            raise ValueError(f"counts sum {counts.sum()} + outside {self.n_outside} != total {self.total}")
        self.edges = edges
        self.counts = counts
        return self

    @property
    def bins(self) -> int:
        return int(self.counts.size)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def width(self) -> float:
        """구간 폭 Δ (균등 구간)"""
        return float(self.edges[1] - self.edges[0])

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def density(self) -> np.ndarray:
        """중점 밀도 P_k / (N·Δ)"""
        return self.counts / (self.total * self.widths)

    @property
    def poisson_errors(self) -> np.ndarray:
        """밀도의 Poisson 오차 √P_k / (N·Δ)"""
        return np.sqrt(self.counts) / (self.total * self.widths)

    @property
    def nonempty(self) -> int:
        return int(np.count_nonzero(self.counts))

    def index_moment(self) -> float:
        """Σ_k k·P_k (k = 0..B−1)"""
        return float(np.dot(np.arange(self.bins), self.counts))

    def integral(self) -> float:
        """중점 규칙 적분 Σ density·Δ (clip 없으면 1)"""
        return float(np.sum(self.density * self.widths))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "midpoint": self.midpoints,
            "density": self.density,
            "count": self.counts,
            "poisson_error": self.poisson_errors,
        })


def _values(data: DataLike) -> np.ndarray:
    if isinstance(data, DetrendedReturns):
        return data.x
    return np.asarray(data, dtype=float).ravel()


def bin(data: DataLike, bins: int = 100, clip: Optional[float] = None) -> EmpiricalHist:
    """
    수익률 구간화

    범위는 데이터의 [min, max] (clip이 주어지면 대칭 범위 [−clip, clip], 범위 밖은 n_outside).
    구간은 왼쪽 닫힘이고 최댓값은 마지막 구간에 들어갑니다.

    Args:
        data: DetrendedReturns 또는 1차원 배열
        bins: 구간 수 B (≥ 2)
        clip: 대칭 범위 반폭 (선택)

    Returns:
        EmpiricalHist
    """
    if bins < 2:
        raise VoltailError(f"bin count must be >= 2, got {bins}")
    x = _values(data)
    if x.size == 0:
        raise VoltailError("cannot bin an empty series")
    if not np.all(np.isfinite(x)):
        raise VoltailError("cannot bin non-finite values")

    if clip is not None:
        if clip <= 0:
            raise VoltailError(f"clip must be positive, got {clip}")
        lo, hi = -float(clip), float(clip)
    else:
        lo, hi = float(np.min(x)), float(np.max(x))
        if hi <= lo:
            raise VoltailError("all data identical: zero-width bin range")

    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    n_outside = int(x.size - counts.sum())
    lag = data.lag if isinstance(data, DetrendedReturns) else None
    return EmpiricalHist(edges=edges, counts=counts, total=float(x.size), n_outside=n_outside, lag=lag)


def _step_values(hist: EmpiricalHist, points: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(hist.edges, points, side="right") - 1
    idx = np.clip(idx, 0, hist.bins - 1)
    return hist.density[idx]


def _pair_distance(h1: EmpiricalHist, h2: EmpiricalHist, lo: float, hi: float) -> float:
    # 두 계단 함수의 차는 합친 분할의 각 조각에서 상수
    cuts = np.union1d(h1.edges, h2.edges)
    cuts = np.union1d(cuts[(cuts > lo) & (cuts < hi)], [lo, hi])
    points = 0.5 * (cuts[:-1] + cuts[1:])
    return float(np.max(np.abs(_step_values(h1, points) - _step_values(h2, points))))


def collapse_metric(hists: Sequence[EmpiricalHist]) -> float:
    """
    스케일링 붕괴 거리

    정규화된 데이터의 lag별 히스토그램을 공통 지지(교집합) 위에서 비교한
    쌍별 sup 거리의 최댓값. 작을수록 P_t(x) = f(x/√t)/√t 가 성립합니다.

    Args:
        hists: lag별 히스토그램 (2개 이상)

    Returns:
        최대 쌍별 sup 거리
    """
    hists = list(hists)
    if len(hists) < 2:
        raise VoltailError("collapse_metric needs at least 2 histograms")
    lo = max(float(h.edges[0]) for h in hists)
    hi = min(float(h.edges[-1]) for h in hists)
    if hi <= lo:
        raise VoltailError("histograms have disjoint supports")

    distance = max(_pair_distance(h1, h2, lo, hi) for h1, h2 in combinations(hists, 2))
    logger.debug(f"collapse metric over [{lo:.3f}, {hi:.3f}] for {len(hists)} histograms: {distance:.4e}")
    return distance


def bootstrap_collapse_floor(data: DataLike, bins: int = 100, rng: Union[int, np.random.Generator, None] = None,
                             n_boot: int = 20, clip: Optional[float] = None, quantile: float = 0.95) -> float:
    """
    collapse_metric의 Monte Carlo 잡음 바닥

    같은 데이터에서 두 번 복원 추출한 히스토그램 사이의 거리 분포의 분위수.

    Args:
        data: 기준 lag의 정규화된 수익률
        bins: 구간 수
        rng: 시드 또는 numpy Generator
        n_boot: 부트스트랩 반복 수
        clip: 대칭 범위 (없으면 원 데이터의 [min, max]로 고정)
        quantile: 보고할 분위수

    Returns:
        잡음 바닥 거리
    """
    if n_boot < 1:
        raise VoltailError(f"n_boot must be >= 1, got {n_boot}")
    x = _values(data)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    half_range = clip if clip is not None else float(np.max(np.abs(x)))

    distances = []
    for _ in range(n_boot):
        pair = [bin(gen.choice(x, size=x.size, replace=True), bins, clip=half_range) for _ in range(2)]
        distances.append(collapse_metric(pair))
    floor = float(np.quantile(distances, quantile))
    logger.info(f"bootstrap collapse floor ({n_boot} resamples, q={quantile}): {floor:.4e}")
    return floor


class WidthScaling(BaseModel):
    """lag별 폭 w_t 와 ln w 대 ln t 기울기"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    table: pd.DataFrame
    fit: LogLogSlope

    @property
    def slope(self) -> float:
        return self.fit.slope


def width_vs_lag(prices: PriceSeries, lags: Sequence[int], overlapping: bool = True) -> WidthScaling:
    """
    폭-lag 스케일링

    Args:
        prices: 가격 시계열
        lags: 시간 지연 목록 (3개 이상)
        overlapping: 겹치는 lag 수익률 사용 여부

    Returns:
        WidthScaling (trend_summary 표 + 로그-로그 기울기)
    """
    lags = sorted({int(t) for t in lags})
    if len(lags) < 3:
        raise VoltailError(f"width_vs_lag needs at least 3 distinct lags, got {len(lags)}")
    table = trend_summary(prices, lags, overlapping)
    degenerate = table["width"] <= WIDTH_FLOOR * np.maximum(1.0, table["mean"].abs())
    if degenerate.any():
        bad = table.loc[degenerate, "lag"].tolist()
        raise VoltailError(f"zero detrended width at lags {bad}: pure trend has no width scaling")
    pairs: List[tuple] = list(zip(table["lag"].astype(float), table["width"].astype(float)))
    fit = loglog_slope(pairs)
    logger.info(f"width scaling over lags {lags[0]}..{lags[-1]}: slope {fit.slope:.4f} ± {fit.stderr:.4f}")
    return WidthScaling(table=table, fit=fit)
