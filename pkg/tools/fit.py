"""
히스토그램 피팅
로그 밀도에 대한 Tsallis 형태 ln P(x) = a − c·ln(1 + b·x²/2) 가중 최소제곱 피팅,
가우시안 기준선, 로그-로그 기울기
"""

import logging
import math
from typing import TYPE_CHECKING, Dict, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from scipy import optimize, stats

from tools.errors import FitError, VoltailError

if TYPE_CHECKING:
    from tools.histogram import EmpiricalHist

logger = logging.getLogger(__name__)

MIN_TSALLIS_BINS = 8
MIN_GAUSSIAN_BINS = 3
B_GRID = (1e-4, 1e3)
C_GRID = (0.55, 500.0)
GRID_POINTS = 80
REFINE_BOUNDS = ((math.log(1e-6), math.log(1e4)), (math.log(0.5), math.log(1e4)))
NO_FINITE_VARIANCE = "no finite-variance Tsallis interpretation (c <= 3/2)"


class FitReport(BaseModel):
    """Tsallis 피팅 결과와 (β, θ) 사상"""

    lag: float = Field(..., gt=0)
    a: float
    b: float = Field(..., gt=0)
    c: float = Field(..., gt=0)
    beta: Optional[float] = None
    theta: Optional[float] = None
    rss_tsallis: float
    rss_gaussian: Optional[float] = None
    n_bins_used: int
    stderr_a: Optional[float] = None
    stderr_b: Optional[float] = None
    stderr_c: Optional[float] = None
    stderr_beta: Optional[float] = None
    stderr_theta: Optional[float] = None
    valid_tsallis: bool = True
    weighting: str = "poisson"
    message: str = ""

    def to_json_dict(self) -> Dict[str, object]:
        return self.model_dump(mode="json")


class GaussianFit(BaseModel):
    """로그 밀도 포물선 피팅의 가우시안 파라미터"""

    mean: float
    variance: float = Field(..., gt=0)
    rss: float
    n_bins_used: int


class LogLogSlope(BaseModel):
    """(ln t, ln w) 최소제곱 직선"""

    slope: float
    intercept: float
    stderr: float
    intercept_stderr: float
    rvalue: float
    n_points: int


class _LogData:
    """비어 있지 않은 구간의 (X, ln ρ, 가중치)"""

    def __init__(self, hist: "EmpiricalHist"):
        mask = hist.counts > 0
        self.x = hist.midpoints[mask]
        self.log_density = np.log(hist.density[mask])
        self.weights = np.asarray(hist.counts[mask], dtype=float)
        self.n = int(mask.sum())

    def weighted_center(self, values: np.ndarray) -> np.ndarray:
        """가중 평균을 뺀 값 (마지막 축 기준)"""
        mean = np.sum(values * self.weights, axis=-1, keepdims=True) / self.weights.sum()
        return values - mean

    def log_kernel(self, b: np.ndarray) -> np.ndarray:
        """q(b) = ln(1 + b·X²/2), b는 스칼라 또는 (n_b, 1)"""
        return np.log1p(np.asarray(b) * self.x ** 2 / 2.0)

    def rss(self, b: float, c: float) -> Tuple[float, float]:
        """a를 해석적으로 소거한 잔차 제곱합과 최적 a"""
        g = -c * self.log_kernel(b)
        a = float(np.dot(self.weights, self.log_density - g) / self.weights.sum())
        resid = self.log_density - a - g
        return float(np.dot(self.weights, resid ** 2)), a


def _grid_search(data: _LogData, grid_points: int) -> Tuple[float, float, float]:
    """(b, c) 로그 격자 전수 탐색, a는 소거. RSS(c) = S_LL + 2c·S_Lq + c²·S_qq"""
    b_grid = np.geomspace(*B_GRID, grid_points)
    c_grid = np.geomspace(*C_GRID, grid_points)

    lc = data.weighted_center(data.log_density)
    qc = data.weighted_center(data.log_kernel(b_grid[:, None]))
    s_ll = float(np.dot(data.weights, lc ** 2))
    s_lq = qc @ (data.weights * lc)
    s_qq = (qc ** 2) @ data.weights

    surface = s_ll + 2.0 * np.outer(s_lq, c_grid) + np.outer(s_qq, c_grid ** 2)
    i, j = np.unravel_index(np.argmin(surface), surface.shape)
    return float(b_grid[i]), float(c_grid[j]), float(surface[i, j])


def _covariance(data: _LogData, a: float, b: float, c: float, rss: float) -> Optional[np.ndarray]:
    """국소 2차 근사 공분산 s²·(JᵀJ)⁻¹, 파라미터 순서 (a, b, c)"""
    dof = data.n - 3
    if dof <= 0:
        return None
    sqrt_w = np.sqrt(data.weights)
    half_x2 = data.x ** 2 / 2.0
    jac = np.column_stack([
        -sqrt_w,
        sqrt_w * c * half_x2 / (1.0 + b * half_x2),
        sqrt_w * np.log1p(b * half_x2),
    ])
    try:
        return (rss / dof) * np.linalg.inv(jac.T @ jac)
    except np.linalg.LinAlgError:
        return None


def _sqrt_or_none(value: float) -> Optional[float]:
    return math.sqrt(value) if np.isfinite(value) and value >= 0 else None


def fit_gaussian(hist: "EmpiricalHist") -> GaussianFit:
    """
    가우시안 기준선

    ln ρ 에 포물선을 같은 Poisson 가중치로 피팅하여 평균/분산과 RSS를 구합니다.

    Raises:
        VoltailError: 비어 있지 않은 구간 3개 미만
        FitError: 볼록하지 않은 포물선
    """
    data = _LogData(hist)
    if data.n < MIN_GAUSSIAN_BINS:
        raise VoltailError(f"fit_gaussian needs at least {MIN_GAUSSIAN_BINS} nonempty bins, got {data.n}")

    # np.polyfit은 w·잔차를 제곱하므로 √가중치를 넘김
    p2, p1, p0 = np.polyfit(data.x, data.log_density, 2, w=np.sqrt(data.weights))
    if not p2 < 0:
        raise FitError("log-density parabola is not concave", {"p2": float(p2), "p1": float(p1), "p0": float(p0)})

    variance = -1.0 / (2.0 * p2)
    resid = data.log_density - np.polyval([p2, p1, p0], data.x)
    return GaussianFit(
        mean=float(p1 * variance),
        variance=float(variance),
        rss=float(np.dot(data.weights, resid ** 2)),
        n_bins_used=data.n,
    )


def fit_tsallis(hist: "EmpiricalHist", t: float = 1.0, grid_points: int = GRID_POINTS) -> FitReport:
    """
    Tsallis 로그 형태 피팅

    Σ w_k·(ln ρ_k − a + c·ln(1 + b·X_k²/2))² 를 비어 있지 않은 구간에서 최소화합니다 (w_k = P_k).
    (b, c) 거친 격자 탐색 후 (ln b, ln c)에서 Nelder-Mead로 정밀화하며 a는 해석적으로 소거합니다.
    β = c − 3/2, θ = 1/(b·β·t).

    Args:
        hist: 정규화된 수익률 히스토그램
        t: lag
        grid_points: 격자 축당 점 수

    Returns:
        FitReport (c ≤ 3/2 이면 valid_tsallis=False, beta/theta 없음)

    Raises:
        VoltailError: 비어 있지 않은 구간 8개 미만
        FitError: 정밀화 비수렴 (best에 최선점)
    """
    if t <= 0:
        raise VoltailError(f"lag must be positive, got {t}")
    data = _LogData(hist)
    if data.n < MIN_TSALLIS_BINS:
        raise VoltailError(f"fit_tsallis needs at least {MIN_TSALLIS_BINS} nonempty bins, got {data.n}")

    b0, c0, grid_rss = _grid_search(data, grid_points)
    logger.debug(f"grid optimum b={b0:.4g} c={c0:.4g} rss={grid_rss:.6g}")

    def objective(log_bc: np.ndarray) -> float:
        b, c = np.exp(log_bc)
        return data.rss(b, c)[0]

    result = optimize.minimize(objective, x0=np.log([b0, c0]), method="Nelder-Mead", bounds=REFINE_BOUNDS,
                               options={"xatol": 1e-9, "fatol": 1e-11, "maxiter": 10000})
    if result.fun <= grid_rss:
        b, c = (float(v) for v in np.exp(result.x))
    else:
        b, c = b0, c0
    rss, a = data.rss(b, c)

    if not result.success:
        raise FitError(f"Tsallis refinement did not converge: {result.message}",
                       {"a": a, "b": b, "c": c, "rss": rss})

    cov = _covariance(data, a, b, c, rss)
    stderr = [None, None, None] if cov is None else [_sqrt_or_none(cov[i, i]) for i in range(3)]

    try:
        rss_gaussian = fit_gaussian(hist).rss
    except FitError as e:
        logger.warning(f"Gaussian baseline unavailable: {e}")
        rss_gaussian = None

    report = dict(lag=t, a=a, b=b, c=c, rss_tsallis=rss, rss_gaussian=rss_gaussian, n_bins_used=data.n,
                  stderr_a=stderr[0], stderr_b=stderr[1], stderr_c=stderr[2])

    if c <= 1.5:
        logger.warning(f"lag {t}: fitted c={c:.4f}, {NO_FINITE_VARIANCE}")
        return FitReport(**report, valid_tsallis=False, message=NO_FINITE_VARIANCE)

    beta = c - 1.5
    theta = 1.0 / (b * beta * t)
    stderr_theta = None
    if cov is not None:
        grad = np.array([0.0, -theta / b, -theta / beta])
        stderr_theta = _sqrt_or_none(float(grad @ cov @ grad))

    logger.info(f"lag {t}: beta={beta:.4f} theta={theta:.4f} (c={c:.4f}, b={b:.4g}, {data.n} bins)")
    return FitReport(**report, beta=beta, theta=theta, stderr_beta=stderr[2], stderr_theta=stderr_theta)


def loglog_slope(pairs: Sequence[Tuple[float, float]]) -> LogLogSlope:
    """
    ln w 대 ln t 최소제곱 직선

    Args:
        pairs: (t, w_t) 목록 (3개 이상, 모두 양수)

    Returns:
        LogLogSlope
    """
    arr = np.asarray(list(pairs), dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise VoltailError("loglog_slope expects (t, w) pairs")
    if arr.shape[0] < 3:
        raise VoltailError(f"loglog_slope needs at least 3 pairs, got {arr.shape[0]}")
    if np.any(~(arr > 0)):
        raise VoltailError("loglog_slope requires positive lags and widths")
    if np.ptp(arr[:, 0]) == 0:
        raise VoltailError("loglog_slope needs at least two distinct lags")

    reg = stats.linregress(np.log(arr[:, 0]), np.log(arr[:, 1]))
    return LogLogSlope(
        slope=float(reg.slope),
        intercept=float(reg.intercept),
        stderr=float(reg.stderr),
        intercept_stderr=float(reg.intercept_stderr),
        rvalue=float(reg.rvalue),
        n_points=int(arr.shape[0]),
    )
