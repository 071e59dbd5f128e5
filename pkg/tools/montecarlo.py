"""
Monte Carlo 시뮬레이션
결합 Langevin 방정식의 Euler-Maruyama 적분과 변동성을 정상 분포에서 고정한 BO 시뮬레이션

  dx = −a(v)dt + √v dW₁
  dv = −γ(v−θ)dt + b(v) dW₂,   dW₂ = ρ dW₁ + √(1−ρ²) dW⊥

경로는 고정 크기 블록 단위로 처리하며, 각 블록의 난수 생성기는 (루트 시드, 블록 인덱스)에서
유도합니다. 따라서 결과는 스레드 수와 스케줄에 무관하지만 block_size에는 의존합니다.
재현에는 (seed, block_size)가 함께 필요합니다 (CLI에서는 VOLTAIL_MC_BLOCK_SIZE).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Literal, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import stats

from config import settings
from tools.bo_pdf import BoPdf, TsallisParams, bo_cdf, tsallis_distribution
from tools.errors import SimulationError, VoltailError
from tools.models import DriftScheme, ModelKind, ModelParams
from tools.stationary import StationaryDist, derive_rng, sample_v

logger = logging.getLogger(__name__)


class SimConfig(BaseModel):
    """시뮬레이션 설정"""
    model_config = ConfigDict(frozen=True)

    params: ModelParams
    dt: float = Field(0.01, gt=0)
    horizon: float = Field(1.0, gt=0)
    paths: int = Field(10_000, ge=1)
    rho: float = Field(0.0, ge=-1.0, le=1.0)
    seed: int = 0
    v0: Union[float, Literal["stationary"]] = "stationary"
    store_stride: Optional[int] = Field(None, ge=1, description="궤적 저장 간격 (스텝)")
    record_times: List[float] = Field(default_factory=list, description="x를 기록할 시각")
    block_size: int = Field(4096, ge=1, description="시드 블록당 경로 수. 난수 스트림이 블록 단위로 유도되므로 "
                                                     "같은 seed라도 block_size가 다르면 경로 값이 달라짐")

    @field_validator("v0")
    @classmethod
    def _check_v0(cls, v):
        if v != "stationary" and not v > 0:
            raise ValueError("v0 must be positive or 'stationary'")
        return v

    @model_validator(mode="after")
    def _check_horizon(self):
        if self.horizon < self.dt:
            raise ValueError("horizon must be >= dt")
        for tau in self.record_times:
            if not (0 < tau <= self.horizon + 1e-12):
                raise ValueError(f"record time {tau} outside (0, horizon]")
        return self

    @property
    def kind(self) -> ModelKind:
        return self.params.kind

    @property
    def scheme(self) -> DriftScheme:
        return self.params.scheme

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.horizon / self.dt)))


class PathSet(BaseModel):
    """
    시뮬레이션 결과

    terminal: 경로별 최종 x
    recorded: 기록 시각별 x 배열
    x_paths / v_paths: store_stride로 저장한 궤적 (paths × 저장점)
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    terminal: np.ndarray
    v_terminal: np.ndarray
    recorded: Dict[float, np.ndarray] = Field(default_factory=dict)
    x_paths: Optional[np.ndarray] = None
    v_paths: Optional[np.ndarray] = None
    stored_times: Optional[np.ndarray] = None

    @property
    def count(self) -> int:
        return int(self.terminal.size)


def _block_layout(cfg: SimConfig) -> List[tuple]:
    blocks = []
    start = 0
    index = 0
    while start < cfg.paths:
        size = min(cfg.block_size, cfg.paths - start)
        blocks.append((index, start, size))
        start += size
        index += 1
    return blocks


def _initial_variance(cfg: SimConfig, rng: np.random.Generator, size: int) -> np.ndarray:
    if cfg.v0 == "stationary":
        return sample_v(StationaryDist.from_params(cfg.params), rng, size)
    return np.full(size, float(cfg.v0))


def _record_steps(cfg: SimConfig) -> Dict[int, List[float]]:
    steps: Dict[int, List[float]] = {}
    for tau in cfg.record_times:
        steps.setdefault(max(1, int(round(tau / cfg.dt))), []).append(tau)
    return steps


def _simulate_joint_block(cfg: SimConfig, block: tuple) -> Dict[str, object]:
    index, start, size = block
    rng = derive_rng(cfg.seed, index)
    p = cfg.params
    dt = cfg.dt
    sqrt_dt = math.sqrt(dt)
    ito = cfg.scheme is DriftScheme.ITO
    heston = cfg.kind is ModelKind.HESTON
    rho_perp = math.sqrt(max(0.0, 1.0 - cfg.rho ** 2))
    record_steps = _record_steps(cfg)

    x = np.zeros(size)
    v = _initial_variance(cfg, rng, size)
    log_v = None if heston else np.log(v)
    recorded: Dict[float, np.ndarray] = {}
    x_store, v_store = [], []

    for step in range(1, cfg.n_steps + 1):
        z1 = rng.standard_normal(size)
        z2 = rng.standard_normal(size)
        dw1 = sqrt_dt * z1
        dw2 = sqrt_dt * (cfg.rho * z1 + rho_perp * z2)

        if heston:
            # full truncation: v⁺ = max(v, 0)를 드리프트와 확산 모두에 사용
            v_plus = np.maximum(v, 0.0)
            x += (-0.5 * v_plus * dt if ito else 0.0) + np.sqrt(v_plus) * dw1
            v = v - p.gamma * (v_plus - p.theta) * dt + p.kappa * np.sqrt(v_plus) * dw2
        else:
            # ln v 좌표: d(ln v) = [−γ(v−θ)/v − κ²/2]dt + κ dW₂
            x += (-0.5 * v * dt if ito else 0.0) + np.sqrt(v) * dw1
            log_v = log_v + (-p.gamma * (v - p.theta) / v - 0.5 * p.kappa ** 2) * dt + p.kappa * dw2
            v = np.exp(log_v)

        finite = np.isfinite(x) & np.isfinite(v)
        if not finite.all():
            bad = int(np.flatnonzero(~finite)[0])
            raise SimulationError(start + bad, step)

        for tau in record_steps.get(step, ()):
            recorded[tau] = x.copy()
        if cfg.store_stride and step % cfg.store_stride == 0:
            x_store.append(x.copy())
            v_store.append(np.maximum(v, 0.0) if heston else v.copy())

    result: Dict[str, object] = {
        "terminal": x,
        "v_terminal": np.maximum(v, 0.0) if heston else v,
        "recorded": recorded,
    }
    if cfg.store_stride:
        result["x_paths"] = np.column_stack(x_store) if x_store else np.empty((size, 0))
        result["v_paths"] = np.column_stack(v_store) if v_store else np.empty((size, 0))
    return result


def _simulate_bo_block(cfg: SimConfig, block: tuple) -> Dict[str, object]:
    index, start, size = block
    rng = derive_rng(cfg.seed, index)
    v = sample_v(StationaryDist.from_params(cfg.params), rng, size)
    a = 0.5 * v if cfg.scheme is DriftScheme.ITO else np.zeros(size)

    # v를 고정한 브라운 운동: 정렬된 기록 시각마다 독립 증분
    times = sorted(set(cfg.record_times) | {cfg.horizon})
    w = np.zeros(size)
    previous = 0.0
    recorded: Dict[float, np.ndarray] = {}
    for tau in times:
        w = w + math.sqrt(tau - previous) * rng.standard_normal(size)
        previous = tau
        recorded[tau] = -a * tau + np.sqrt(v) * w

    terminal = recorded[cfg.horizon]
    if not np.all(np.isfinite(terminal)):
        bad = int(np.flatnonzero(~np.isfinite(terminal))[0])
        raise SimulationError(start + bad, 0)
    return {
        "terminal": terminal,
        "v_terminal": v,
        "recorded": {tau: recorded[tau] for tau in cfg.record_times},
    }


def _run_blocks(cfg: SimConfig, worker, workers: Optional[int]) -> PathSet:
    blocks = _block_layout(cfg)
    n_workers = workers or settings.workers or 1
    logger.info(f"{cfg.paths} paths in {len(blocks)} blocks ({cfg.kind.value}/{cfg.scheme.value}, workers={n_workers})")

    if n_workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            parts = list(pool.map(lambda b: worker(cfg, b), blocks))
    else:
        parts = [worker(cfg, b) for b in blocks]

    recorded = {tau: np.concatenate([part["recorded"][tau] for part in parts]) for tau in cfg.record_times}
    paths = PathSet(
        terminal=np.concatenate([part["terminal"] for part in parts]),
        v_terminal=np.concatenate([part["v_terminal"] for part in parts]),
        recorded=recorded,
    )
    if "x_paths" in parts[0]:
        paths.x_paths = np.concatenate([part["x_paths"] for part in parts])
        paths.v_paths = np.concatenate([part["v_paths"] for part in parts])
        n_stored = paths.x_paths.shape[1]
        paths.stored_times = cfg.dt * cfg.store_stride * np.arange(1, n_stored + 1)
    return paths


def simulate_joint(cfg: SimConfig, workers: Optional[int] = None) -> PathSet:
    """
    결합 과정 Euler-Maruyama 시뮬레이션

    Heston은 full truncation Euler, Hull-White는 ln v 좌표 적분(양수 보장)을 사용합니다.

    Args:
        cfg: 시뮬레이션 설정
        workers: 스레드 수 (None이면 settings.workers)

    Returns:
        PathSet (시드가 같으면 비트 단위로 동일)

    Raises:
        SimulationError: 유한하지 않은 값이 생긴 경로와 스텝
    """
    return _run_blocks(cfg, _simulate_joint_block, workers)


def simulate_bo(cfg: SimConfig, workers: Optional[int] = None) -> PathSet:
    """
    BO 시뮬레이션 - 경로마다 v를 Π(v)에서 한 번 뽑고 x ~ N(−a(v)T, vT)

    cfg.v0와 dt는 결과에 영향을 주지 않습니다.
    """
    return _run_blocks(cfg, _simulate_bo_block, workers)


def bo_ks_distance(samples: np.ndarray, model: BoPdf, grid_points: int = 1201) -> float:
    """
    샘플과 BO 예측 분포 사이의 KS 거리

    Hull-White/ZeroDrift는 Student-t CDF를 그대로 쓰고, 나머지는 격자 CDF를 보간합니다.
    """
    samples = np.asarray(samples, dtype=float)
    p = model.params
    if p.kappa > 0 and model.kind is ModelKind.HULL_WHITE and model.scheme is DriftScheme.ZERO:
        dist = tsallis_distribution(TsallisParams.from_model(p, model.t))
        return float(stats.kstest(samples, dist.cdf).statistic)

    spread = float(np.std(samples)) or math.sqrt(p.theta * model.t)
    grid = np.linspace(samples.min() - 2.0 * spread, samples.max() + 2.0 * spread, grid_points)
    cdf_values = bo_cdf(model, grid)
    return float(stats.kstest(samples, lambda s: np.interp(s, grid, cdf_values)).statistic)


def bo_discrepancy(cfg_joint: SimConfig, lags: Sequence[float], workers: Optional[int] = None,
                   min_paths: int = 1000) -> pd.DataFrame:
    """
    결합 시뮬레이션과 BO 예측 사이의 lag별 KS 거리

    Args:
        cfg_joint: 결합 시뮬레이션 설정 (horizon ≥ max lag)
        lags: 비교할 시간 지연 목록
        workers: 스레드 수

    Returns:
        DataFrame (lag, gamma_t, ks_distance)
    """
    lags = sorted(float(t) for t in lags)
    if not lags:
        raise VoltailError("bo_discrepancy needs at least one lag")
    if cfg_joint.paths < min_paths:
        raise VoltailError(f"bo_discrepancy needs at least {min_paths} paths, got {cfg_joint.paths}")
    if cfg_joint.horizon < lags[-1]:
        raise VoltailError(f"horizon {cfg_joint.horizon} shorter than max lag {lags[-1]}")
    if cfg_joint.rho != 0.0:
        logger.warning(f"rho={cfg_joint.rho}: BO analytics assume uncorrelated Wiener increments")

    cfg = cfg_joint.model_copy(update={"record_times": lags})
    paths = simulate_joint(cfg, workers=workers)

    rows = []
    for lag in lags:
        model = BoPdf(params=cfg.params, t=lag)
        distance = bo_ks_distance(paths.recorded[lag], model)
        rows.append({"lag": lag, "gamma_t": cfg.params.gamma * lag, "ks_distance": distance})
        logger.info(f"lag {lag}: gamma*t={cfg.params.gamma * lag:.3g}, KS={distance:.4f}")
    return pd.DataFrame(rows)
