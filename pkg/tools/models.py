"""
확률 변동성 모델 정의
미시적 파라미터(γ, θ, κ, μ), 드리프트 처방 a(v), 변동성 확산 b(v), 형태 상수
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator

from tools.errors import DeterministicLimit, DomainError

ArrayLike = Union[float, np.ndarray]


class ModelKind(str, Enum):
    """변동성 확산 모델 종류"""
    HESTON = "heston"          # b(v) = κ√v
    HULL_WHITE = "hullwhite"   # b(v) = κv


class DriftScheme(str, Enum):
    """로그 수익률 드리프트 처방"""
    ITO = "ito"        # a(v) = v/2
    ZERO = "zero"      # a(v) = 0


_KIND_ALIASES = {"heston": ModelKind.HESTON, "hullwhite": ModelKind.HULL_WHITE,
                 "hull-white": ModelKind.HULL_WHITE, "hull_white": ModelKind.HULL_WHITE, "hw": ModelKind.HULL_WHITE}
_SCHEME_ALIASES = {"ito": DriftScheme.ITO, "zero": DriftScheme.ZERO, "zerodrift": DriftScheme.ZERO,
                   "zero-drift": DriftScheme.ZERO, "zero_drift": DriftScheme.ZERO}


def parse_kind(value: Union[str, ModelKind]) -> ModelKind:
    """문자열을 ModelKind로 변환 (대소문자, 하이픈 무시)"""
    if isinstance(value, ModelKind):
        return value
    key = str(value).strip().lower()
    if key not in _KIND_ALIASES:
        raise ValueError(f"unknown model kind: {value}")
    return _KIND_ALIASES[key]


def parse_scheme(value: Union[str, DriftScheme]) -> DriftScheme:
    """문자열을 DriftScheme으로 변환"""
    if isinstance(value, DriftScheme):
        return value
    key = str(value).strip().lower()
    if key not in _SCHEME_ALIASES:
        raise ValueError(f"unknown drift scheme: {value} (supported: ito, zero)")
    return _SCHEME_ALIASES[key]


class ModelParams(BaseModel):
    """
    미시적 모델 파라미터

    시간 단위는 데이터 샘플링 간격(lag 1 = 거래일 1일)이고 모든 비율은 lag 단위당입니다.
    """
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(..., gt=0, description="평균 회귀 속도")
    theta: float = Field(..., gt=0, description="평균 분산")
    kappa: float = Field(..., ge=0, description="변동성의 변동성 계수 (0 = 결정론적 극한)")
    mu: float = Field(0.0, description="로그 가격 결정론적 드리프트")
    kind: ModelKind = ModelKind.HULL_WHITE
    scheme: DriftScheme = DriftScheme.ZERO

    @field_validator("kind", mode="before")
    @classmethod
    def _coerce_kind(cls, v: Any) -> ModelKind:
        return parse_kind(v)

    @field_validator("scheme", mode="before")
    @classmethod
    def _coerce_scheme(cls, v: Any) -> DriftScheme:
        return parse_scheme(v)

    @property
    def deterministic(self) -> bool:
        return self.kappa == 0.0

    @property
    def alpha(self) -> float:
        """Heston 형태 상수 α = 2γθ/κ²"""
        return shape_constants(self, ModelKind.HESTON)

    @property
    def beta(self) -> float:
        """Hull-White 형태 상수 β = 2γ/κ²"""
        return shape_constants(self, ModelKind.HULL_WHITE)

    def to_flat(self) -> Dict[str, Any]:
        """평탄한 key-value 설정으로 직렬화"""
        return {
            "gamma": self.gamma,
            "theta": self.theta,
            "kappa": self.kappa,
            "mu": self.mu,
            "kind": self.kind.value,
            "scheme": self.scheme.value,
        }

    @classmethod
    def from_flat(cls, flat: Dict[str, Any]) -> "ModelParams":
        """
        평탄한 key-value 설정에서 생성

        Args:
            flat: gamma, theta, kappa, mu, kind, scheme 키를 가진 딕셔너리 (값은 문자열도 허용)
        """
        known = {"gamma", "theta", "kappa", "mu", "kind", "scheme"}
        unknown = set(flat) - known
        if unknown:
            raise ValueError(f"unknown model keys: {sorted(unknown)}")
        return cls(**{k: v for k, v in flat.items() if v is not None})

    @classmethod
    def from_shape(cls, kind: Union[str, ModelKind], shape: float, theta: float,
                   kappa: float = 1.0, **kwargs: Any) -> "ModelParams":
        """
        형태 상수(α 또는 β)와 θ에서 γ를 역산해 생성

        Heston: γ = ακ²/(2θ), Hull-White: γ = βκ²/2
        """
        kind = parse_kind(kind)
        if kind is ModelKind.HESTON:
            gamma = shape * kappa ** 2 / (2.0 * theta)
        else:
            gamma = shape * kappa ** 2 / 2.0
        return cls(gamma=gamma, theta=theta, kappa=kappa, kind=kind, **kwargs)


def load_model_config(path: Union[str, Path]) -> ModelParams:
    """
    key=value 또는 YAML 형식 파일에서 ModelParams 로드

    '#'로 시작하는 줄과 빈 줄은 무시합니다.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if lines and all("=" in ln and ":" not in ln for ln in lines):
        flat = {}
        for ln in lines:
            key, _, value = ln.partition("=")
            flat[key.strip()] = value.strip()
    else:
        flat = yaml.safe_load(text) or {}
    return ModelParams.from_flat(flat)


def _check_variance(v: ArrayLike) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError(f"variance must be non-negative, got {v}")
    return arr


def _as_output(arr: np.ndarray) -> ArrayLike:
    return float(arr) if arr.ndim == 0 else arr


def drift_a(v: ArrayLike, scheme: Union[str, DriftScheme]) -> ArrayLike:
    """
    드리프트 처방 a(v)

    Args:
        v: 분산 (v ≥ 0)
        scheme: Ito → v/2, ZeroDrift → 0

    Returns:
        a(v)
    """
    arr = _check_variance(v)
    if parse_scheme(scheme) is DriftScheme.ITO:
        return _as_output(0.5 * arr)
    return _as_output(np.zeros_like(arr))


def diffusion_b(v: ArrayLike, kind: Union[str, ModelKind], params: ModelParams) -> ArrayLike:
    """
    변동성 확산 계수 b(v)

    Args:
        v: 분산 (v ≥ 0)
        kind: Heston → κ√v, HullWhite → κv
        params: 모델 파라미터 (κ 사용)

    Returns:
        b(v)
    """
    arr = _check_variance(v)
    if parse_kind(kind) is ModelKind.HESTON:
        return _as_output(params.kappa * np.sqrt(arr))
    return _as_output(params.kappa * arr)


def shape_constants(params: ModelParams, kind: Union[str, ModelKind, None] = None) -> float:
    """
    정상분포 형태 상수

    Args:
        params: 모델 파라미터
        kind: 생략 시 params.kind

    Returns:
        Heston α = 2γθ/κ² 또는 Hull-White β = 2γ/κ²

    Raises:
        DeterministicLimit: κ = 0
    """
    kind = parse_kind(kind) if kind is not None else params.kind
    if params.kappa == 0.0:
        raise DeterministicLimit(params.theta)
    k2 = params.kappa ** 2
    if kind is ModelKind.HESTON:
        return 2.0 * params.gamma * params.theta / k2
    return 2.0 * params.gamma / k2
