"""
합성 가격 데이터 생성 스크립트
시장 데이터 없이 파이프라인을 실행할 수 있도록 가격 CSV(date, close)를 생성합니다.

- gbm: 기하 브라운 운동 (i.i.d. 가우시안 로그 증분)
- hullwhite: 결합 확률 변동성 과정의 Euler-Maruyama 경로
"""

import argparse
import logging
import math
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from config import settings
from tools.models import ModelParams
from tools.montecarlo import SimConfig, simulate_joint

logger = logging.getLogger(__name__)


def gbm_prices(n: int, mu: float = 4.35e-4, sigma: float = 0.01, s0: float = 100.0,
               seed: Optional[int] = None) -> np.ndarray:
    """
    기하 브라운 운동 일별 종가

    Args:
        n: 가격 개수
        mu: 일별 로그 드리프트
        sigma: 일별 로그 변동성
        s0: 시작 가격
        seed: 난수 시드

    Returns:
        길이 n의 가격 배열
    """
    rng = np.random.default_rng(seed)
    steps = mu + sigma * rng.standard_normal(n - 1)
    return s0 * np.exp(np.concatenate([[0.0], np.cumsum(steps)]))


def stochastic_volatility_prices(params: ModelParams, n: int, segment: int = 1000, substeps: int = 10,
                                 s0: float = 100.0, seed: Optional[int] = None) -> np.ndarray:
    """
    확률 변동성 모델 일별 종가

    정상 분포에서 시작하는 길이 segment의 독립 경로들을 이어 붙여 n개의 가격을 만듭니다.
    하루는 substeps개의 Euler 스텝이며, 로그 가격에는 params.mu의 일별 드리프트가 더해집니다.

    Args:
        params: 모델 파라미터 (시간 단위: 1일)
        n: 가격 개수
        segment: 경로 하나의 길이 (일)
        substeps: 하루당 적분 스텝 수
        s0: 시작 가격
        seed: 루트 시드

    Returns:
        길이 n의 가격 배열
    """
    days = n - 1
    n_paths = max(1, math.ceil(days / segment))
    cfg = SimConfig(
        params=params,
        dt=1.0 / substeps,
        horizon=float(segment),
        paths=n_paths,
        seed=settings.seed if seed is None else seed,
        store_stride=substeps,
        block_size=settings.mc_block_size,
    )
    paths = simulate_joint(cfg)
    daily = np.diff(np.column_stack([np.zeros(n_paths), paths.x_paths]), axis=1).ravel()[:days]
    log_s = np.concatenate([[0.0], np.cumsum(daily + params.mu)])
    return s0 * np.exp(log_s)


def save_prices(prices: np.ndarray, filepath: Path) -> Path:
    """가격을 (date, close) CSV로 저장 (date는 1부터 시작하는 거래일 번호)"""
    filepath = Path(filepath)
    filepath.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame({"date": np.arange(1, prices.size + 1), "close": prices})
    frame.to_csv(filepath, index=False, float_format="%.8f")
    logger.info(f"saved {prices.size} prices to {filepath}")
    return filepath


def main():
    """메인 실행 함수"""
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--kind", choices=["gbm", "hullwhite"], default="gbm")
    parser.add_argument("-n", type=int, default=5930, help="가격 개수")
    parser.add_argument("--mu", type=float, default=4.35e-4)
    parser.add_argument("--sigma", type=float, default=0.01, help="gbm 일별 변동성")
    parser.add_argument("--gamma", type=float, default=0.05)
    parser.add_argument("--theta", type=float, default=1e-4)
    parser.add_argument("--kappa", type=float, default=0.3)
    parser.add_argument("--seed", type=int, default=settings.seed)
    parser.add_argument("--out", type=Path, default=Path(settings.data_dir) / "synthetic_prices.csv")
    args = parser.parse_args()

    logging.basicConfig(level=settings.log_level.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    if args.kind == "gbm":
        prices = gbm_prices(args.n, mu=args.mu, sigma=args.sigma, seed=args.seed)
    else:
        params = ModelParams(gamma=args.gamma, theta=args.theta, kappa=args.kappa, mu=args.mu,
                             kind="hullwhite", scheme="zero")
        prices = stochastic_volatility_prices(params, args.n, seed=args.seed)
    save_prices(prices, args.out)


if __name__ == "__main__":
    main()
