"""
Volatility Simulation Skill
확률 변동성 모델의 Monte Carlo 시뮬레이션과 BO 근사 비교
"""

import math
from typing import Dict, Any, List, Optional

import numpy as np
import pandas as pd

from config import settings
from config.pipeline import PipelineConfig, resolve_horizon
from skills.base_skill import BaseSkill, SkillMetadata
from tools.bo_pdf import BoPdf
from tools.histogram import bin
from tools.montecarlo import PathSet, SimConfig, bo_discrepancy, bo_ks_distance, simulate_bo, simulate_joint
from utils.report_writer import ReportWriter

# 단측 KS 95% 임계값 계수 (점근)
KS_CRITICAL_95 = 1.358


class VolatilitySimulationSkill(BaseSkill):
    """
    변동성 시뮬레이션 Skill

    기능:
    - simulate: 결합 과정(또는 BO) 경로 시뮬레이션, lag별 수익률 샘플/히스토그램 출력
    - compare: 결합 시뮬레이션 vs BO 예측, BO 시뮬레이션 vs BO 예측 KS 거리
    """

    def _load_metadata(self) -> SkillMetadata:
        """메타데이터 로드"""
        return SkillMetadata(
            name="volatility_simulation",
            description="Heston / Hull-White 확률 변동성 Monte Carlo 시뮬레이션",
            version="1.0.0",
            dependencies=["numpy", "scipy", "pandas"],
            tags=["simulation", "monte-carlo", "heston", "hull-white", "ks"]
        )

    def _initialize_tools(self) -> Dict[str, Any]:
        """도구 초기화"""
        return {
            'joint_simulator': simulate_joint,
            'bo_simulator': simulate_bo,
            'discrepancy': bo_discrepancy,
        }

    def get_capabilities(self) -> List[str]:
        return ["simulate", "compare"]

    def execute(self, task: str, context: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Volatility Simulation 실행

        Args:
            task: 수행할 작업
            context: PipelineConfig 필드 (model, lags, dt, paths, rho, seed, out_dir, ...)

        Returns:
            작업 결과
        """
        cfg = self.pipeline_config(context)
        sim = self._sim_config(cfg)

        if task == "simulate":
            result = self._simulate(cfg, sim)
            if cfg.compare:
                result["compare"] = self._compare(cfg, sim)
            return result
        elif task == "compare":
            return self._compare(cfg, sim)
        else:
            raise ValueError(f"Unknown task: {task}")

    def _sim_config(self, cfg: PipelineConfig) -> SimConfig:
        horizon = resolve_horizon(cfg.horizon, cfg.lags)
        return SimConfig(
            params=cfg.require_model(),
            dt=cfg.dt,
            horizon=horizon,
            paths=cfg.paths,
            rho=cfg.rho,
            seed=cfg.seed,
            v0=self.config.get('v0', "stationary"),
            record_times=[float(t) for t in cfg.lags if t <= horizon],
            block_size=settings.mc_block_size,
        )

    def _simulate(self, cfg: PipelineConfig, sim: SimConfig) -> Dict[str, Any]:
        """경로 시뮬레이션과 lag별 샘플/히스토그램 출력"""
        simulator = self.tools['bo_simulator'] if cfg.bo_only else self.tools['joint_simulator']
        paths: PathSet = simulator(sim, workers=cfg.workers)
        writer = ReportWriter(cfg.out_dir)

        samples = {"path": np.arange(paths.count), "v_terminal": paths.v_terminal}
        summary: Dict[str, Any] = {}
        for tau in sim.record_times:
            x = paths.recorded[tau]
            label = f"{tau:g}"
            samples[f"x_t{label}"] = x
            writer.write_tsv(f"sim_hist_t{label}.tsv", bin(x, cfg.bins).to_frame())
            summary[label] = {
                "mean": float(np.mean(x)),
                "variance": float(np.var(x)),
                "theta_t": sim.params.theta * tau,
            }
        samples_path = writer.write_tsv("samples.tsv", pd.DataFrame(samples))

        payload = {
            "mode": "bo" if cfg.bo_only else "joint",
            "model": sim.params.to_flat(),
            "dt": sim.dt,
            "horizon": sim.horizon,
            "paths": sim.paths,
            "rho": sim.rho,
            "seed": sim.seed,
            "lags": summary,
            "v_terminal_mean": float(np.mean(paths.v_terminal)),
        }
        writer.write_json("simulation.json", payload)
        return {"summary": payload, "samples_path": str(samples_path)}

    def _compare(self, cfg: PipelineConfig, sim: SimConfig) -> Dict[str, Any]:
        """결합 vs BO 예측, BO 샘플 vs BO 예측 KS 거리"""
        lags = sim.record_times or [sim.horizon]
        table = self.tools['discrepancy'](sim, lags, workers=cfg.workers,
                                          min_paths=int(self.config.get('min_compare_paths', 1000)))

        bo_paths = self.tools['bo_simulator'](sim.model_copy(update={"record_times": lags}), workers=cfg.workers)
        table["ks_bo_sim"] = [bo_ks_distance(bo_paths.recorded[lag], BoPdf(params=sim.params, t=lag))
                              for lag in table["lag"]]
        table["ks_critical_95"] = KS_CRITICAL_95 / math.sqrt(sim.paths)

        writer = ReportWriter(cfg.out_dir)
        writer.write_tsv("compare.tsv", table)
        payload = {"rho": sim.rho, "paths": sim.paths, "rows": table.to_dict(orient="records")}
        writer.write_json("compare.json", payload)
        return payload
