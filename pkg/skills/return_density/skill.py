"""
Return Density Skill
BO 근사 수익률 분포를 균등 격자 위에서 계산해 TSV로 출력
"""

from typing import Dict, Any, List, Optional

import numpy as np
import pandas as pd
from scipy import integrate

from config.pipeline import PipelineConfig
from skills.base_skill import BaseSkill, SkillMetadata
from tools.bo_pdf import BoPdf, TsallisParams, pdf_general, pdf_heston, pdf_tsallis, tail_exponents
from tools.errors import VoltailError
from tools.models import DriftScheme, ModelKind, ModelParams
from utils.report_writer import ReportWriter


class ReturnDensitySkill(BaseSkill):
    """
    수익률 분포 Skill

    기능:
    - pdf: general(수치 적분) / heston(Bessel-K 닫힌 형태) / tsallis(Hull-White 닫힌 형태)
    """

    def _load_metadata(self) -> SkillMetadata:
        """메타데이터 로드"""
        return SkillMetadata(
            name="return_density",
            description="Born-Oppenheimer 근사 수익률 분포 계산",
            version="1.0.0",
            dependencies=["numpy", "scipy"],
            tags=["pdf", "density", "tsallis", "heston", "bessel"]
        )

    def _initialize_tools(self) -> Dict[str, Any]:
        """도구 초기화"""
        quad = self.config.get('quadrature', {})
        epsabs = float(quad.get('epsabs', 1e-10))
        epsrel = float(quad.get('epsrel', 1e-8))
        return {
            'general': lambda params, t, x: pdf_general(BoPdf(params=params, t=t), x, epsabs, epsrel),
            'heston': self._heston,
            'tsallis': self._tsallis,
        }

    def get_capabilities(self) -> List[str]:
        return ["pdf"]

    def execute(self, task: str, context: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Return Density 실행

        Args:
            task: 수행할 작업
            context: PipelineConfig 필드 (model, pdf, t, grid, out_dir)

        Returns:
            작업 결과
        """
        cfg = self.pipeline_config(context)

        if task == "pdf":
            return self._pdf(cfg)
        else:
            raise ValueError(f"Unknown task: {task}")

    @staticmethod
    def _heston(params: ModelParams, t: float, x: np.ndarray) -> np.ndarray:
        if params.kind is not ModelKind.HESTON:
            raise VoltailError("heston closed form requires --model heston")
        return pdf_heston(params, params.scheme, t, x)

    @staticmethod
    def _tsallis(params: ModelParams, t: float, x: np.ndarray) -> np.ndarray:
        if params.kind is not ModelKind.HULL_WHITE or params.scheme is not DriftScheme.ZERO:
            raise VoltailError("tsallis closed form requires --model hullwhite --scheme zero")
        return pdf_tsallis(TsallisParams.from_model(params, t), x)

    def _pdf(self, cfg: PipelineConfig) -> Dict[str, Any]:
        params = cfg.require_model()
        grid = np.linspace(cfg.grid.lo, cfg.grid.hi, cfg.grid.points)
        density = np.asarray(self.tools[cfg.pdf](params, cfg.t, grid), dtype=float)

        writer = ReportWriter(cfg.out_dir)
        path = writer.write_tsv("pdf.tsv", pd.DataFrame({"x": grid, "density": density}))

        finite = np.where(np.isfinite(density), density, 0.0)
        payload = {
            "pdf": cfg.pdf,
            "model": params.to_flat(),
            "t": cfg.t,
            "grid": cfg.grid.model_dump(),
            "integral": float(integrate.trapezoid(finite, grid)),
            "tails": tail_exponents(params.kind, params, params.scheme, cfg.t).model_dump(),
        }
        writer.write_json("pdf.json", payload)
        self.logger.info(f"{cfg.pdf} pdf on {cfg.grid.points} points, integral {payload['integral']:.6f}")
        return {"summary": payload, "pdf_path": str(path)}
