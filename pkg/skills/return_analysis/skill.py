"""
Return Analysis Skill
가격 시계열의 lag별 디트렌딩, 구간화, Tsallis/가우시안 피팅과 스케일링 진단
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Any, List, Optional, Tuple

import numpy as np
import pandas as pd

from config import settings
from config.pipeline import PipelineConfig
from skills.base_skill import BaseSkill, SkillMetadata
from tools.data_tools import load_prices
from tools.detrend import (PriceSeries, detrended_returns, estimate_drift, lag_returns,
                           linear_detrend, normalize, yearly_earnings)
from tools.errors import VoltailError
from tools.fit import fit_gaussian, fit_tsallis
from tools.histogram import EmpiricalHist, bin, bootstrap_collapse_floor, collapse_metric, width_vs_lag
from utils.report_writer import ReportWriter


class ReturnAnalysisSkill(BaseSkill):
    """
    수익률 분포 분석 Skill

    기능:
    - analyze: lag별 디트렌딩 → 정규화 → 구간화 → 피팅, 붕괴 거리, 폭-lag 기울기, 드리프트
    - detrend: 디트렌딩된 수익률 출력
    - hist: 구간화만 수행
    - trend: lag별 추세/폭 표와 폭-lag 기울기
    """

    def _load_metadata(self) -> SkillMetadata:
        """메타데이터 로드"""
        return SkillMetadata(
            name="return_analysis",
            description="가격 시계열의 수익률 분포 분석과 Tsallis 피팅",
            version="1.0.0",
            dependencies=["numpy", "scipy", "pandas"],
            tags=["returns", "histogram", "fit", "scaling", "detrend"]
        )

    def _initialize_tools(self) -> Dict[str, Any]:
        """도구 초기화"""
        return {
            'price_loader': load_prices,
            'binner': bin,
            'tsallis_fitter': fit_tsallis,
            'gaussian_fitter': fit_gaussian,
        }

    def get_capabilities(self) -> List[str]:
        return ["analyze", "detrend", "hist", "trend"]

    def execute(self, task: str, context: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """
        Return Analysis 실행

        Args:
            task: 수행할 작업
            context: PipelineConfig 필드 (input, lags, bins, clip, out_dir, seed, ...)

        Returns:
            작업 결과 (출력 파일 경로 포함)
        """
        cfg = self.pipeline_config(context)

        if task == "analyze":
            return self._analyze(cfg)
        elif task == "detrend":
            return self._detrend(cfg)
        elif task == "hist":
            return self._hist(cfg)
        elif task == "trend":
            return self._trend(cfg)
        else:
            raise ValueError(f"Unknown task: {task}")

    def _load(self, cfg: PipelineConfig) -> PriceSeries:
        return self.tools['price_loader'](cfg.require_input(), lenient=cfg.lenient)

    def _map_lags(self, cfg: PipelineConfig, work) -> List[Tuple[int, Any]]:
        """lag별 작업을 스레드 풀에서 실행 (결과는 lag 순서)"""
        workers = cfg.workers or settings.workers or 1
        if workers > 1 and len(cfg.lags) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(zip(cfg.lags, pool.map(work, cfg.lags)))
        return [(t, work(t)) for t in cfg.lags]

    def _trend_lags(self, cfg: PipelineConfig, n_prices: int) -> List[int]:
        limit = min(int(self.config.get('trend_lags_max', 500)), n_prices // 4)
        return [t for t in cfg.trend_lags if t <= limit]

    def _analyze(self, cfg: PipelineConfig) -> Dict[str, Any]:
        """전체 파이프라인"""
        prices = self._load(cfg)
        writer = ReportWriter(cfg.out_dir)

        def run_lag(t: int) -> Dict[str, Any]:
            try:
                x = detrended_returns(prices, t, cfg.overlapping)
                hist = self.tools['binner'](x, cfg.bins, clip=cfg.clip)
                writer.write_tsv(f"hist_lag{t}.tsv", hist.to_frame())
                entry: Dict[str, Any] = {
                    "count": x.count,
                    "width": x.width,
                    "index_moment": hist.index_moment(),
                    "n_outside": hist.n_outside,
                    "hist": hist,
                    "data": x,
                }
                entry["fit"] = self.tools['tsallis_fitter'](hist, t).to_json_dict()
                try:
                    entry["gaussian"] = self.tools['gaussian_fitter'](hist).model_dump()
                except VoltailError as e:
                    entry["gaussian"] = {"error": str(e)}
                return entry
            except ValueError as e:
                self.logger.warning(f"lag {t}: {e}")
                return {"error": str(e)}

        per_lag = dict(self._map_lags(cfg, run_lag))

        hists: List[EmpiricalHist] = [e["hist"] for e in per_lag.values() if "hist" in e]
        collapse: Dict[str, Any] = {"distance": None, "floor": None}
        if len(hists) >= 2:
            collapse["distance"] = collapse_metric(hists)
            if cfg.bootstrap > 0:
                base = next(e["data"] for e in per_lag.values() if "data" in e)
                collapse["floor"] = bootstrap_collapse_floor(
                    base, cfg.bins, rng=np.random.default_rng(cfg.seed), n_boot=cfg.bootstrap, clip=cfg.clip,
                    quantile=float(self.config.get('bootstrap_quantile', 0.95)))

        scaling, drift = self._width_and_drift(cfg, prices, writer)

        report = {
            "input": str(cfg.input),
            "n_prices": len(prices),
            "bins": cfg.bins,
            "clip": cfg.clip,
            "overlapping": cfg.overlapping,
            "seed": cfg.seed,
            "lags": {
                str(t): {k: v for k, v in entry.items() if k not in ("hist", "data")}
                for t, entry in per_lag.items()
            },
            "collapse": collapse,
            "width_scaling": scaling,
            "drift": drift,
        }
        report_path = writer.write_json("report.json", report)
        failed = [t for t, e in per_lag.items() if "error" in e]
        if failed:
            self.logger.warning(f"fit failed for lags {failed}")
        return {"report": report, "report_path": str(report_path)}

    def _width_and_drift(self, cfg: PipelineConfig, prices: PriceSeries,
                         writer: ReportWriter) -> Tuple[Dict[str, Any], Dict[str, Any]]:
        trend_lags = self._trend_lags(cfg, len(prices))
        try:
            scaling = width_vs_lag(prices, trend_lags, cfg.overlapping)
        except VoltailError as e:
            self.logger.warning(f"width scaling unavailable: {e}")
            return {"error": str(e)}, {"error": str(e)}

        writer.write_tsv("trend.tsv", scaling.table)
        mu = estimate_drift(scaling.table)
        scaling_dict = scaling.fit.model_dump()
        scaling_dict.update({"lag_min": trend_lags[0], "lag_max": trend_lags[-1]})
        return scaling_dict, {"mu": mu, "yearly_earnings": yearly_earnings(mu)}

    def _detrend(self, cfg: PipelineConfig) -> Dict[str, Any]:
        """디트렌딩된 수익률 출력 (i, ξ, 추세, 정규화 x)"""
        prices = self._load(cfg)
        writer = ReportWriter(cfg.out_dir)

        def run_lag(t: int) -> Dict[str, Any]:
            xi = lag_returns(prices, t, cfg.overlapping)
            fitted = linear_detrend(xi)
            x = normalize(fitted)
            index = np.arange(1, xi.count + 1)
            frame = pd.DataFrame({"i": index, "xi": xi.xi, "trend": fitted.a + fitted.b * index, "x": x.x})
            path = writer.write_tsv(f"detrended_lag{t}.tsv", frame)
            return {"a": fitted.a, "b": fitted.b, "width": fitted.width, "count": xi.count, "path": str(path)}

        return {"lags": {str(t): r for t, r in self._map_lags(cfg, run_lag)}}

    def _hist(self, cfg: PipelineConfig) -> Dict[str, Any]:
        """구간화만 수행"""
        prices = self._load(cfg)
        writer = ReportWriter(cfg.out_dir)

        def run_lag(t: int) -> Dict[str, Any]:
            hist = self.tools['binner'](detrended_returns(prices, t, cfg.overlapping), cfg.bins, clip=cfg.clip)
            path = writer.write_tsv(f"hist_lag{t}.tsv", hist.to_frame())
            return {"bins": hist.bins, "total": hist.total, "n_outside": hist.n_outside,
                    "index_moment": hist.index_moment(), "path": str(path)}

        return {"lags": {str(t): r for t, r in self._map_lags(cfg, run_lag)}}

    def _trend(self, cfg: PipelineConfig) -> Dict[str, Any]:
        """lag별 추세/폭 표와 폭-lag 기울기, 드리프트"""
        prices = self._load(cfg)
        writer = ReportWriter(cfg.out_dir)
        scaling, drift = self._width_and_drift(cfg, prices, writer)
        if "error" in scaling:
            raise VoltailError(scaling["error"])
        payload = {"width_scaling": scaling, "drift": drift}
        writer.write_json("trend.json", payload)
        return payload
