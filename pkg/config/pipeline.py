"""
파이프라인 설정
CLI 하위 명령과 Skill이 공유하는 실행 설정 (기본값은 B=100, 추세 lag 1..500)
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import Settings, settings
from tools.models import ModelParams

PdfKind = Literal["general", "heston", "tsallis"]


class GridSpec(BaseModel):
    """균등 x 격자 [lo, hi] × points"""
    model_config = ConfigDict(frozen=True)

    lo: float = -10.0
    hi: float = 10.0
    points: int = 2001

    @model_validator(mode="after")
    def _check_grid(self):
        if self.points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.points}")
        if not self.hi > self.lo:
            raise ValueError(f"grid upper bound {self.hi} must exceed lower bound {self.lo}")
        return self


class PipelineConfig(BaseModel):
    """수익률 분석 / 시뮬레이션 / PDF 출력 설정"""
    model_config = ConfigDict(frozen=True)

    input: Optional[Path] = None
    lags: List[int] = Field(default_factory=lambda: [1])
    trend_lags: List[int] = Field(default_factory=lambda: list(range(1, 501)))
    bins: int = Field(100, ge=2)
    clip: Optional[float] = Field(None, gt=0)
    overlapping: bool = True
    lenient: bool = False
    bootstrap: int = Field(20, ge=0)

    model: Optional[ModelParams] = None
    rho: float = Field(0.0, ge=-1.0, le=1.0)
    dt: float = Field(0.01, gt=0)
    horizon: Optional[float] = Field(None, gt=0)
    paths: int = Field(10_000, ge=1)
    bo_only: bool = False
    compare: bool = False

    pdf: PdfKind = "general"
    t: float = Field(1.0, gt=0)
    grid: GridSpec = Field(default_factory=GridSpec)

    out_dir: Path = Path(settings.output_dir)
    seed: int = settings.seed
    workers: Optional[int] = Field(None, ge=1)

    @field_validator("lags", "trend_lags")
    @classmethod
    def _check_lags(cls, v: List[int]) -> List[int]:
        if any(t < 1 for t in v):
            raise ValueError("lags must be >= 1")
        return sorted(set(int(t) for t in v))

    @field_validator("model", mode="before")
    @classmethod
    def _coerce_model(cls, v: Any) -> Any:
        if isinstance(v, dict):
            return ModelParams.from_flat(v)
        return v

    def require_model(self) -> ModelParams:
        if self.model is None:
            raise ValueError("model parameters (gamma, theta, kappa) are required")
        return self.model

    def require_input(self) -> Path:
        if self.input is None:
            raise ValueError("--input is required")
        return self.input

    @classmethod
    def from_context(cls, defaults: Dict[str, Any], context: Optional[Dict[str, Any]]) -> "PipelineConfig":
        """Skill config.yaml 기본값 위에 작업 컨텍스트(None 제외)를 덮어써 생성"""
        merged: Dict[str, Any] = dict(defaults or {})
        merged.update({k: v for k, v in (context or {}).items() if v is not None})
        return cls(**{k: v for k, v in merged.items() if k in cls.model_fields})


def effective_seed(cli_seed: Optional[int]) -> int:
    """VOLTAIL_SEED(환경 변수 또는 .env)가 설정되어 있으면 그 값이 --seed보다 우선"""
    current = Settings()
    if "seed" in current.model_fields_set:
        return current.seed
    return current.seed if cli_seed is None else int(cli_seed)


def resolve_horizon(horizon: Optional[float], lags: List[Union[int, float]]) -> float:
    """horizon이 없으면 가장 큰 lag"""
    if horizon is not None:
        return float(horizon)
    return float(max(lags)) if lags else 1.0
