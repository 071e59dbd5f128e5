"""
특수 함수
닫힌 형태 PDF에 필요한 ln Γ(x)와 제2종 변형 Bessel 함수 K_ν(z)

K_ν는 scipy.special.kve(지수 스케일)로 계산하고, kve가 넘치거나 0이 되는 구간
(큰 ν, 작은 z)에서는 적분 표현 K_ν(z) = ∫₀^∞ e^(−z·cosh t)·cosh(νt) dt 를 로그 공간에서
직접 적분합니다.
"""

import math
from typing import Union

import numpy as np
from scipy import integrate, special

from tools.errors import DomainError

ArrayLike = Union[float, np.ndarray]

MAX_ORDER = 60.0


def ln_gamma(x: ArrayLike) -> ArrayLike:
    """
    ln Γ(x), x > 0

    Args:
        x: 양의 실수 (또는 배열)

    Returns:
        ln Γ(x)

    Raises:
        DomainError: x ≤ 0
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    out = special.gammaln(arr)
    return float(out) if out.ndim == 0 else out


def _check_bessel_args(nu: float, z: np.ndarray) -> None:
    if not (0.0 <= nu <= MAX_ORDER):
        raise DomainError(f"bessel_k order must lie in [0, {MAX_ORDER}], got {nu}")
    if np.any(~(z > 0)):
        raise DomainError("bessel_k requires z > 0")


def _log_bessel_k_integral(nu: float, z: float) -> float:
    """적분 표현으로 ln K_ν(z) 계산 (kve가 표현 범위를 벗어날 때)"""

    def log_integrand(t: float) -> float:
        # ln cosh(νt) = νt + ln(1 + e^(−2νt)) − ln 2
        return -z * math.cosh(t) + nu * t + math.log1p(math.exp(-2.0 * nu * t)) - math.log(2.0)

    t_peak = math.asinh(nu / z) if nu > 0 else 0.0
    g_max = log_integrand(t_peak)

    def integrand(t: float) -> float:
        return math.exp(log_integrand(t) - g_max)

    total = 0.0
    if t_peak > 0:
        left, _ = integrate.quad(integrand, 0.0, t_peak, epsabs=0.0, epsrel=1e-12, limit=200)
        total += left
    right, _ = integrate.quad(integrand, t_peak, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    total += right
    return g_max + math.log(total)


def log_bessel_k(nu: float, z: ArrayLike) -> ArrayLike:
    """
    ln K_ν(z) - 매우 작거나 큰 K 값에서도 넘침 없이 계산

    Args:
        nu: 차수 (0 ≤ ν ≤ 60)
        z: 양의 실수 인자 (또는 배열)

    Returns:
        ln K_ν(z)
    """
    zarr = np.atleast_1d(np.asarray(z, dtype=float))
    _check_bessel_args(nu, zarr)

    scaled = special.kve(nu, zarr)
    with np.errstate(divide="ignore"):
        out = np.log(scaled) - zarr

    bad = ~np.isfinite(out)
    for idx in np.flatnonzero(bad):
        out[idx] = _log_bessel_k_integral(float(nu), float(zarr[idx]))

    if np.ndim(z) == 0:
        return float(out[0])
    return out


def bessel_k(nu: float, z: ArrayLike) -> ArrayLike:
    """
    K_ν(z), 실수 ν ≥ 0, z > 0

    넘침 구간에서는 inf, 언더플로 구간에서는 0을 돌려줄 수 있습니다.
    그런 경우에는 log_bessel_k를 사용하세요.
    """
    zarr = np.asarray(z, dtype=float)
    _check_bessel_args(nu, np.atleast_1d(zarr))
    out = special.kv(nu, zarr)
    return float(out) if np.ndim(out) == 0 else out


def log_small_argument_limit(nu: float) -> float:
    """
    ln lim_{z→0} z^ν·K_ν(z) = ln[Γ(ν)·2^(ν−1)]  (ν > 0)

    ν = 0이면 극한이 발산합니다.
    """
    if nu <= 0:
        raise DomainError("small-argument limit of z^nu K_nu(z) diverges for nu <= 0")
    return float(special.gammaln(nu)) + (nu - 1.0) * math.log(2.0)
