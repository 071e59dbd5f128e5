"""
Born-Oppenheimer 평균 수익률 분포 P_t(x)

- pdf_general: 정상 분포 Π(v)에 대한 조건부 가우시안의 수치 적분
- pdf_heston: Bessel-K 닫힌 형태 (수치 재정규화)
- pdf_tsallis: Hull-White / ZeroDrift의 Tsallis(t-Student) 닫힌 형태
- tail_exponents: 꼬리 감쇠율 / 멱지수
"""

import logging
import math
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate, stats

from tools.errors import QuadratureError, VoltailError
from tools.models import (DriftScheme, ModelKind, ModelParams, drift_a, parse_kind,
                          parse_scheme, shape_constants)
from tools.special_fn import ln_gamma, log_bessel_k, log_small_argument_limit
from tools.stationary import StationaryDist

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8
U_RANGE = (-40.0, 40.0)
_COARSE_POINTS = 1601
_NEGLIGIBLE_LOG = math.log(1e-18)


class BoPdf(BaseModel):
    """BO 근사 수익률 분포 - 모델 종류와 드리프트 처방은 params가 가진다"""
    model_config = ConfigDict(frozen=True)

    params: ModelParams
    t: float = Field(..., gt=0, description="시간 지연 (lag 단위)")

    @classmethod
    def create(cls, params: ModelParams, t: float,
               kind: Union[str, ModelKind, None] = None,
               scheme: Union[str, DriftScheme, None] = None) -> "BoPdf":
        update = {}
        if kind is not None:
            update["kind"] = parse_kind(kind)
        if scheme is not None:
            update["scheme"] = parse_scheme(scheme)
        if update:
            params = params.model_copy(update=update)
        return cls(params=params, t=t)

    @property
    def kind(self) -> ModelKind:
        return self.params.kind

    @property
    def scheme(self) -> DriftScheme:
        return self.params.scheme

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        return pdf_general(self, x)


class TsallisParams(BaseModel):
    """Tsallis 분포 파라미터 (β, θ, t)"""
    model_config = ConfigDict(frozen=True)

    beta: float = Field(..., gt=0)
    theta: float = Field(..., gt=0)
    t: float = Field(1.0, gt=0)

    @classmethod
    def from_model(cls, params: ModelParams, t: float) -> "TsallisParams":
        return cls(beta=shape_constants(params, ModelKind.HULL_WHITE), theta=params.theta, t=t)


class TailExponents(BaseModel):
    """
    꼬리 구조

    win_rate / loss_rate: 지수 감쇠율 (밀도 ~ e^(−rate·|x|)), 0이면 해당 쪽은 멱법칙
    power_exponent: 밀도 ~ |x|^(−p) 인 쪽의 멱지수
    """
    f: Optional[float] = None
    win_rate: Optional[float] = None
    loss_rate: Optional[float] = None
    power_exponent: Optional[float] = None
    gaussian: bool = False


# ---------------------------------------------------------------------------
# 일반 BO 적분
# ---------------------------------------------------------------------------

def _log_pi_u_factory(dist: StationaryDist):
    """u = ln(v/θ) 좌표에서 ln[Π(v)·v] 를 돌려주는 (스칼라, 배열) 함수 쌍"""
    shape = dist.shape
    theta = dist.theta

    if dist.kind is ModelKind.HESTON:
        rate = shape / theta
        const = shape * math.log(rate) - ln_gamma(shape)

        def log_pi_v(lv, v):
            return const + shape * lv - rate * v
    else:
        scale = shape * theta
        const = (shape + 1.0) * math.log(scale) - ln_gamma(shape + 1.0)

        def log_pi_v(lv, v):
            return const - (shape + 1.0) * lv - scale / v

    return log_pi_v


def _gaussian_density(x: np.ndarray, mean: float, var: float) -> np.ndarray:
    return np.exp(-(x - mean) ** 2 / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)


def _pdf_general_point(x: float, log_pi_v, theta: float, t: float, ito: bool,
                       epsabs: float, epsrel: float) -> float:
    log_theta = math.log(theta)
    log_2pi_t = math.log(2.0 * math.pi * t)

    def log_integrand_array(u: np.ndarray) -> np.ndarray:
        lv = log_theta + u
        v = np.exp(lv)
        mean_shift = x + (0.5 * v * t if ito else 0.0)
        return log_pi_v(lv, v) - mean_shift ** 2 / (2.0 * v * t) - 0.5 * (log_2pi_t + lv)

    # 굵은 격자로 피크와 유효 구간을 찾은 뒤 최대값으로 스케일링
    coarse = np.linspace(U_RANGE[0], U_RANGE[1], _COARSE_POINTS)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        values = log_integrand_array(coarse)
    values = np.where(np.isfinite(values), values, -np.inf)
    peak = int(np.argmax(values))
    g_max = float(values[peak])
    if not np.isfinite(g_max):
        return 0.0

    significant = np.flatnonzero(values - g_max > _NEGLIGIBLE_LOG)
    step = coarse[1] - coarse[0]
    lo = max(U_RANGE[0], coarse[significant[0]] - step)
    hi = min(U_RANGE[1], coarse[significant[-1]] + step)
    u_peak = float(coarse[peak])

    def integrand(u: float) -> float:
        lv = log_theta + u
        v = math.exp(lv)
        mean_shift = x + (0.5 * v * t if ito else 0.0)
        g = log_pi_v(lv, v) - mean_shift * mean_shift / (2.0 * v * t) - 0.5 * (log_2pi_t + lv)
        return math.exp(g - g_max)

    scaled_epsabs = epsabs * math.exp(-g_max) if g_max < 700 else 0.0
    points = [u_peak] if lo < u_peak < hi else None
    result = integrate.quad(integrand, lo, hi, points=points, epsabs=scaled_epsabs,
                            epsrel=epsrel, limit=400, full_output=1)
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > max(scaled_epsabs, epsrel * abs(value)) * 10.0:
        raise QuadratureError(f"BO integral did not converge at x={x}", abserr * math.exp(g_max))
    return value * math.exp(g_max)


def pdf_general(model: BoPdf, x: ArrayLike, epsabs: float = QUAD_EPSABS,
                epsrel: float = QUAD_EPSREL) -> ArrayLike:
    """
    BO 평균 밀도 P_t(x) = ∫₀^∞ Π(v)·N(x; −a(v)t, vt) dv

    v = θ·e^u 치환 후 u ∈ [−40, 40]에서 적응 구적법으로 적분합니다.

    Args:
        model: BoPdf
        x: 로그 수익률 (스칼라 또는 배열)
        epsabs: 절대 허용오차
        epsrel: 상대 허용오차

    Returns:
        밀도 값

    Raises:
        QuadratureError: 구적법이 허용오차에 도달하지 못한 경우
    """
    params = model.params
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    ito = model.scheme is DriftScheme.ITO
    dist = StationaryDist.from_params(params, model.kind)

    if dist.deterministic:
        a = float(drift_a(params.theta, model.scheme))
        out = _gaussian_density(xs, -a * model.t, params.theta * model.t)
    else:
        log_pi_v = _log_pi_u_factory(dist)
        out = np.array([
            _pdf_general_point(float(xi), log_pi_v, params.theta, model.t, ito, epsabs, epsrel)
            for xi in xs
        ])

    return float(out[0]) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Heston 닫힌 형태
# ---------------------------------------------------------------------------

def heston_f(params: ModelParams, scheme: Union[str, DriftScheme], t: float) -> float:
    """
    Bessel 인자 계수 f

    Ito: f = √(1 + 16γ/(κ²t)),  ZeroDrift: f = 4√(γ/(κ²t))
    """
    k2t = params.kappa ** 2 * t
    if parse_scheme(scheme) is DriftScheme.ITO:
        return math.sqrt(1.0 + 16.0 * params.gamma / k2t)
    return 4.0 * math.sqrt(params.gamma / k2t)


def _heston_log_shape(xs: np.ndarray, alpha: float, f: float, ito: bool) -> np.ndarray:
    """정규화 전 ln P: ν·ln|x| + ½ln f + ln K_|ν|(f|x|/2) − x/2 (Ito)"""
    nu = alpha - 0.5
    out = np.empty_like(xs)
    zero = xs == 0.0
    ax = np.abs(xs[~zero])
    out[~zero] = nu * np.log(ax) + 0.5 * math.log(f) + log_bessel_k(abs(nu), 0.5 * f * ax)
    if ito:
        out[~zero] -= 0.5 * xs[~zero]
    if np.any(zero):
        # 제거 가능한 특이점: z^ν K_ν(z) → Γ(ν)·2^(ν−1)
        if nu > 0:
            out[zero] = nu * math.log(2.0 / f) + 0.5 * math.log(f) + log_small_argument_limit(nu)
        else:
            out[zero] = np.inf
    return out


@lru_cache(maxsize=256)
def _heston_log_norm(alpha: float, f: float, ito: bool) -> float:
    """∫ exp(log_shape) dx 의 로그 (수치 재정규화 상수)"""
    sample_x = np.linspace(-40.0 / f, 40.0 / f, 801)
    sample_x = sample_x[sample_x != 0.0]
    ref = float(np.max(_heston_log_shape(sample_x, alpha, f, ito)))

    def integrand(x: float) -> float:
        return math.exp(_heston_log_shape(np.array([x]), alpha, f, ito)[0] - ref)

    total = 0.0
    for lo, hi in ((-np.inf, -1.0), (-1.0, 0.0), (0.0, 1.0), (1.0, np.inf)):
        value, _ = integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-11, limit=400)
        total += value
    return ref + math.log(total)


def pdf_heston(params: ModelParams, scheme: Union[str, DriftScheme], t: float, x: ArrayLike) -> ArrayLike:
    """
    Heston BO 닫힌 형태 밀도

    P_t(x) ∝ |x|^α·√(f/|x|)·e^(−x/2)·K_{α−1/2}(f|x|/2)  (ZeroDrift에서는 e^(−x/2) 없음)
    전체 상수는 ∫P dx = 1이 되도록 수치적으로 정합니다.

    Args:
        params: Heston 모델 파라미터
        scheme: 드리프트 처방
        t: 시간 지연
        x: 로그 수익률

    Returns:
        밀도 값 (x=0은 유한 극한, α ≤ 1/2이면 inf)
    """
    if params.kind is not ModelKind.HESTON:
        raise VoltailError("pdf_heston requires a Heston model")
    if t <= 0:
        raise VoltailError(f"lag must be positive, got {t}")
    scheme = parse_scheme(scheme)
    alpha = shape_constants(params, ModelKind.HESTON)
    f = heston_f(params, scheme, t)
    ito = scheme is DriftScheme.ITO

    xs = np.atleast_1d(np.asarray(x, dtype=float))
    log_p = _heston_log_shape(xs, alpha, f, ito) - _heston_log_norm(alpha, f, ito)
    out = np.exp(log_p)
    return float(out[0]) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Hull-White / Tsallis 닫힌 형태
# ---------------------------------------------------------------------------

def tsallis_norm(beta: float, z: float) -> float:
    """N(β, z) = Γ(β+3/2) / (√(2z)·Γ(β+1)·Γ(1/2))"""
    return math.exp(ln_gamma(beta + 1.5) - ln_gamma(beta + 1.0) - ln_gamma(0.5) - 0.5 * math.log(2.0 * z))


def pdf_tsallis(tp: TsallisParams, x: ArrayLike) -> ArrayLike:
    """
    Tsallis(t-Student) 밀도

    P_t(x) = N(β, βθt)·(1 + x²/(2βθt))^(−(β+3/2))

    Args:
        tp: Tsallis 파라미터
        x: 로그 수익률

    Returns:
        밀도 값
    """
    z = tp.beta * tp.theta * tp.t
    xs = np.asarray(x, dtype=float)
    log_p = math.log(tsallis_norm(tp.beta, z)) - (tp.beta + 1.5) * np.log1p(xs ** 2 / (2.0 * z))
    out = np.exp(log_p)
    return float(out) if np.ndim(out) == 0 else out


def tsallis_distribution(tp: TsallisParams):
    """
    동등한 Student-t 분포 (scipy.stats 고정 분포)

    자유도 2β+2, scale² = βθt/(β+1); 분산은 θt
    """
    return stats.t(df=2.0 * tp.beta + 2.0, scale=math.sqrt(tp.beta * tp.theta * tp.t / (tp.beta + 1.0)))


def central_gaussian_distance(tp: TsallisParams, window: Optional[float] = None, points: int = 2001) -> float:
    """
    중심 영역의 가우시안 근접도

    |x| ≤ window 로 조건부화한 Tsallis 분포와 곡률이 같은 가우시안 N(0, βθt/(β+3/2))
    사이의 KS 거리.

    window 기본값은 t와 무관한 고정 창 2√θ (lag 1 폭)입니다. Tsallis 분포는 t에 대해
    √(θt) 척도족이므로 window = 2√(θt) 로 주면 거리는 t에 무관하고, 고정 창에서만
    t가 커질수록 거리가 단조 감소합니다.

    Args:
        tp: Tsallis 파라미터
        window: 비교 창 반폭 (None이면 2√θ)
        points: 창 안의 비교 격자 점 수

    Returns:
        창 안에서 조건부 CDF 사이의 sup 거리
    """
    window = 2.0 * math.sqrt(tp.theta) if window is None else window
    grid = np.linspace(-window, window, points)
    student = tsallis_distribution(tp)
    gauss = stats.norm(scale=math.sqrt(tp.beta * tp.theta * tp.t / (tp.beta + 1.5)))

    def restricted(dist) -> np.ndarray:
        lo, hi = dist.cdf(-window), dist.cdf(window)
        return (dist.cdf(grid) - lo) / (hi - lo)

    return float(np.max(np.abs(restricted(student) - restricted(gauss))))


# ---------------------------------------------------------------------------
# 꼬리 구조와 CDF
# ---------------------------------------------------------------------------

def tail_exponents(kind: Union[str, ModelKind], params: ModelParams,
                   scheme: Union[str, DriftScheme], t: float) -> TailExponents:
    """
    꼬리 감쇠 구조

    - Heston/Ito: 지수 감쇠율 f₊ = (f+1)/2 (이익), f₋ = (f−1)/2 (손실)
    - Heston/ZeroDrift: 대칭 감쇠율 f/2
    - HullWhite/ZeroDrift: 밀도 멱지수 2(β+3/2)
    - HullWhite/Ito: 이익 쪽 감쇠율 1, 손실 쪽 멱지수 β+2 (BO 적분의 안장점)
    - κ = 0: 가우시안
    """
    kind = parse_kind(kind)
    scheme = parse_scheme(scheme)
    if params.kappa == 0.0:
        return TailExponents(gaussian=True)

    if kind is ModelKind.HESTON:
        f = heston_f(params, scheme, t)
        if scheme is DriftScheme.ITO:
            return TailExponents(f=f, win_rate=(f + 1.0) / 2.0, loss_rate=(f - 1.0) / 2.0)
        return TailExponents(f=f, win_rate=f / 2.0, loss_rate=f / 2.0)

    beta = shape_constants(params, ModelKind.HULL_WHITE)
    if scheme is DriftScheme.ITO:
        return TailExponents(win_rate=1.0, loss_rate=0.0, power_exponent=beta + 2.0)
    return TailExponents(power_exponent=2.0 * (beta + 1.5))


def bo_cdf(model: BoPdf, x_grid: np.ndarray) -> np.ndarray:
    """
    BO 분포의 누적분포 (격자 위)

    Hull-White/ZeroDrift와 κ=0은 닫힌 형태, 나머지는 밀도를 누적 사다리꼴 적분한 뒤
    마지막 값으로 정규화합니다 (격자가 분포 대부분을 덮어야 함).
    """
    x_grid = np.asarray(x_grid, dtype=float)
    params = model.params

    if params.kappa == 0.0:
        a = float(drift_a(params.theta, model.scheme))
        return stats.norm(loc=-a * model.t, scale=math.sqrt(params.theta * model.t)).cdf(x_grid)
    if model.kind is ModelKind.HULL_WHITE and model.scheme is DriftScheme.ZERO:
        return tsallis_distribution(TsallisParams.from_model(params, model.t)).cdf(x_grid)

    if model.kind is ModelKind.HESTON:
        density = pdf_heston(params, model.scheme, model.t, x_grid)
    else:
        density = pdf_general(model, x_grid)
    density = np.where(np.isfinite(density), density, 0.0)
    cumulative = integrate.cumulative_trapezoid(density, x_grid, initial=0.0)
    return cumulative / cumulative[-1]
