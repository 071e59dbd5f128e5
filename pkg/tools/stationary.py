"""
정상 변동성 분포
상세 균형(detailed balance) 분포 Π(v)의 밀도 계산, 샘플링, 균형 조건 수치 검증

- Heston: v ~ Gamma(α, θ/α)
- Hull-White: y = 1/v ~ Gamma(β+1, 1/(βθ)), 즉 v는 역감마 분포
"""

import logging
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import stats

from tools.errors import DeterministicLimit, DomainError, VoltailError
from tools.models import ModelKind, ModelParams, diffusion_b, parse_kind, shape_constants
from tools.special_fn import ln_gamma

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
RngLike = Union[int, np.random.Generator, None]


class StationaryDist(BaseModel):
    """정상 분포 Π(v) - shape는 α(Heston) 또는 β(Hull-White), scale은 θ"""
    model_config = ConfigDict(frozen=True)

    kind: ModelKind
    shape: Optional[float] = Field(None, gt=0)
    theta: float = Field(..., gt=0)

    @property
    def deterministic(self) -> bool:
        """κ = 0 극한 (Π가 θ에서의 델타 함수)"""
        return self.shape is None

    @classmethod
    def from_params(cls, params: ModelParams, kind: Union[str, ModelKind, None] = None) -> "StationaryDist":
        kind = parse_kind(kind) if kind is not None else params.kind
        try:
            shape = shape_constants(params, kind)
        except DeterministicLimit:
            shape = None
        return cls(kind=kind, shape=shape, theta=params.theta)

    def _require_shape(self) -> float:
        if self.shape is None:
            raise DeterministicLimit(self.theta)
        return self.shape

    def to_scipy(self):
        """동등한 scipy.stats 고정 분포 (v에 대한 분포)"""
        shape = self._require_shape()
        if self.kind is ModelKind.HESTON:
            return stats.gamma(a=shape, scale=self.theta / shape)
        return stats.invgamma(a=shape + 1.0, scale=shape * self.theta)

    def inverse_variance_dist(self):
        """Hull-White에서 y = 1/v의 Gamma 분포"""
        shape = self._require_shape()
        if self.kind is not ModelKind.HULL_WHITE:
            raise VoltailError("inverse-variance Gamma law exists only for the Hull-White model")
        return stats.gamma(a=shape + 1.0, scale=1.0 / (shape * self.theta))

    def mean(self) -> float:
        """E[v] - 두 모델 모두 θ"""
        return self.theta

    def variance(self) -> float:
        """Var[v] - Heston θ²/α, Hull-White θ²/(β−1) (β ≤ 1이면 inf)"""
        if self.shape is None:
            return 0.0
        if self.kind is ModelKind.HESTON:
            return self.theta ** 2 / self.shape
        if self.shape <= 1.0:
            return float("inf")
        return self.theta ** 2 / (self.shape - 1.0)

    def mode_y(self) -> float:
        """Hull-White Π(y)의 최빈값 y = β/(βθ) = 1/θ"""
        shape = self._require_shape()
        return shape / (shape * self.theta)


def log_pdf_v(dist: StationaryDist, v: ArrayLike) -> ArrayLike:
    """
    ln Π(v) - 큰 형태 상수에서도 넘치지 않도록 로그 공간에서 계산

    Args:
        dist: 정상 분포
        v: 분산 (v > 0)
    """
    arr = np.asarray(v, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("pdf_v requires v > 0")
    shape = dist._require_shape()
    theta = dist.theta

    if dist.kind is ModelKind.HESTON:
        rate = shape / theta
        out = shape * np.log(rate) + (shape - 1.0) * np.log(arr) - rate * arr - ln_gamma(shape)
    else:
        scale = shape * theta
        # Π_v(v) = Π_y(1/v) / v²
        out = (shape + 1.0) * np.log(scale) - (shape + 2.0) * np.log(arr) - scale / arr - ln_gamma(shape + 1.0)
    return float(out) if np.ndim(out) == 0 else out


def pdf_v(dist: StationaryDist, v: ArrayLike) -> ArrayLike:
    """
    정상 분포 밀도 Π(v)

    Args:
        dist: 정상 분포
        v: 분산 (v > 0)

    Returns:
        Π(v) ≥ 0
    """
    out = np.exp(log_pdf_v(dist, v))
    return float(out) if np.ndim(out) == 0 else out


def pdf_y(dist: StationaryDist, y: ArrayLike) -> ArrayLike:
    """Hull-White 역분산 y = 1/v의 Gamma 밀도 Π(y)"""
    arr = np.asarray(y, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("pdf_y requires y > 0")
    if dist.kind is not ModelKind.HULL_WHITE:
        raise VoltailError("pdf_y is defined for the Hull-White model only")
    shape = dist._require_shape()
    scale = shape * dist.theta
    out = np.exp((shape + 1.0) * np.log(scale) + shape * np.log(arr) - scale * arr - ln_gamma(shape + 1.0))
    return float(out) if np.ndim(out) == 0 else out


def derive_rng(root_seed: int, index: int) -> np.random.Generator:
    """루트 시드와 인덱스(스레드/블록)에서 독립 난수 생성기를 결정론적으로 유도"""
    return np.random.default_rng(np.random.SeedSequence(int(root_seed), spawn_key=(int(index),)))


def _as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_v(dist: StationaryDist, rng: RngLike, n: int) -> np.ndarray:
    """
    Π(v)에서 i.i.d. 샘플 추출

    Gamma 샘플링은 numpy Generator.gamma(형태 < 1과 ≥ 1 모두 유효한 기각법)를 사용합니다.

    Args:
        dist: 정상 분포
        rng: 시드 또는 numpy Generator
        n: 샘플 수 (n ≥ 1)

    Returns:
        분산 샘플 배열
    """
    if n < 1:
        raise VoltailError(f"sample count must be >= 1, got {n}")
    gen = _as_generator(rng)

    if dist.deterministic:
        return np.full(n, dist.theta)

    shape = dist.shape
    if dist.kind is ModelKind.HESTON:
        return gen.gamma(shape, dist.theta / shape, size=n)

    y = gen.gamma(shape + 1.0, 1.0 / (shape * dist.theta), size=n)
    return 1.0 / y


def _balance_residual(pi_vals: np.ndarray, b2_vals: np.ndarray, gamma: float,
                      theta: float, grid: np.ndarray) -> float:
    """d/dv[b²Π] + 2γ(v−θ)Π 의 최대 절대값 / max|2γ(v−θ)Π| (내부 격자점, 중앙 차분)"""
    flux = b2_vals * pi_vals
    derivative = np.gradient(flux, grid)[1:-1]
    restoring = 2.0 * gamma * (grid - theta) * pi_vals

    residual = np.max(np.abs(derivative + restoring[1:-1]))
    scale = np.max(np.abs(restoring))
    if scale == 0.0:
        return 0.0 if residual == 0.0 else float("inf")
    return float(residual / scale)


def balance_residual(params: ModelParams, kind: Union[str, ModelKind, None], grid: np.ndarray) -> float:
    """
    상세 균형 조건 d/dv[b²(v)Π(v)] = −2γ(v−θ)Π(v) 의 상대 잔차

    Args:
        params: 모델 파라미터
        kind: 모델 종류 (None이면 params.kind)
        grid: 양수, 엄격히 증가하는 분산 격자 (3점 이상)

    Returns:
        상대 잔차 (격자 간격에 대해 2차 수렴)
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise VoltailError("balance_residual needs a grid of at least 3 points")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise VoltailError("balance_residual grid must be strictly positive and increasing")

    kind = parse_kind(kind) if kind is not None else params.kind
    dist = StationaryDist.from_params(params, kind)
    pi_vals = pdf_v(dist, grid)
    b2_vals = np.asarray(diffusion_b(grid, kind, params)) ** 2
    residual = _balance_residual(pi_vals, b2_vals, params.gamma, params.theta, grid)
    logger.debug(f"balance residual ({kind.value}, {grid.size} pts): {residual:.3e}")
    return residual
