"""
voltail 명령행 인터페이스
수익률 분포 분석, 변동성 시뮬레이션, BO 분포 출력 하위 명령을 Skill로 전달
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from config import settings
from config.pipeline import effective_seed
from skills.skill_manager import SkillManager
from tools.models import ModelParams, load_model_config

logger = logging.getLogger("voltail")


def parse_lags(text: str) -> List[int]:
    """'1,5,25' 또는 '1..100' (혼합 가능) 형식의 lag 목록"""
    lags: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = (int(v) for v in part.split("..", 1))
            lags.extend(range(lo, hi + 1))
        else:
            lags.append(int(part))
    if not lags:
        raise argparse.ArgumentTypeError(f"empty lag list: '{text}'")
    return lags


def _lags_arg(text: str) -> List[int]:
    try:
        return parse_lags(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid lag list: '{text}'")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="가격 CSV (label, close 또는 close 단일 열)")
    common.add_argument("--lags", type=_lags_arg, help="lag 목록, 예: 1,5,25 또는 1..100")
    common.add_argument("--trend-lags", type=_lags_arg, help="폭-lag 스케일링 lag (기본 1..500)")
    common.add_argument("--bins", type=int, help="구간 수 B (기본 100)")
    common.add_argument("--clip", type=float, help="대칭 구간 범위 [-clip, clip]")
    common.add_argument("--non-overlapping", action="store_true", help="겹치지 않는 lag 수익률")
    common.add_argument("--lenient", action="store_true", help="잘못된 행을 경고 후 건너뜀")
    common.add_argument("--model", help="heston | hullwhite")
    common.add_argument("--scheme", help="ito | zero")
    common.add_argument("--gamma", type=float)
    common.add_argument("--theta", type=float)
    common.add_argument("--kappa", type=float)
    common.add_argument("--mu", type=float)
    common.add_argument("--model-config", type=Path, help="key=value 또는 YAML 모델 파일")
    common.add_argument("--rho", type=float)
    common.add_argument("--dt", type=float)
    common.add_argument("--paths", type=int)
    common.add_argument("--horizon", type=float)
    common.add_argument("--seed", type=int, help="루트 시드 (VOLTAIL_SEED가 있으면 무시)")
    common.add_argument("--out", type=Path, help="출력 디렉토리")
    common.add_argument("--workers", type=int)

    parser = argparse.ArgumentParser(prog="voltail", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common], help="lag별 디트렌딩, 구간화, 피팅, 스케일링 보고서")
    sub.add_parser("detrend", parents=[common], help="디트렌딩된 수익률 출력")
    sub.add_parser("hist", parents=[common], help="구간화만 수행")
    sub.add_parser("trend", parents=[common], help="lag별 추세/폭과 폭-lag 기울기")

    simulate = sub.add_parser("simulate", parents=[common], help="Monte Carlo 시뮬레이션")
    simulate.add_argument("--compare", action="store_true", help="결합 vs BO KS 거리 출력")
    simulate.add_argument("--bo-only", action="store_true", help="v를 정상 분포에서 고정한 BO 시뮬레이션")

    pdf = sub.add_parser("pdf", parents=[common], help="BO 분포를 격자 위에서 출력")
    pdf.add_argument("--pdf", choices=["general", "heston", "tsallis"], default=None)
    pdf.add_argument("--t", type=float, help="시간 지연 (기본 1)")
    pdf.add_argument("--grid", nargs=3, type=float, metavar=("LO", "HI", "POINTS"))
    return parser


def model_from_args(args: argparse.Namespace) -> Optional[ModelParams]:
    """--model-config 위에 개별 플래그를 덮어써 ModelParams 생성 (아무것도 없으면 None)"""
    flat: Dict[str, Any] = {}
    if args.model_config is not None:
        flat.update(load_model_config(args.model_config).to_flat())
    overrides = {"gamma": args.gamma, "theta": args.theta, "kappa": args.kappa,
                 "mu": args.mu, "kind": args.model, "scheme": args.scheme}
    flat.update({k: v for k, v in overrides.items() if v is not None})
    if not flat:
        return None
    return ModelParams.from_flat(flat)


def context_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """CLI 인자를 Skill 컨텍스트(PipelineConfig 필드)로 변환, 지정하지 않은 값은 None"""
    context: Dict[str, Any] = {
        "input": args.input,
        "lags": args.lags,
        "trend_lags": args.trend_lags,
        "bins": args.bins,
        "clip": args.clip,
        "overlapping": False if args.non_overlapping else None,
        "lenient": True if args.lenient else None,
        "model": model_from_args(args),
        "rho": args.rho,
        "dt": args.dt,
        "paths": args.paths,
        "horizon": args.horizon,
        "seed": effective_seed(args.seed),
        "out_dir": args.out,
        "workers": args.workers,
    }
    if args.command == "simulate":
        context["compare"] = True if args.compare else None
        context["bo_only"] = True if args.bo_only else None
    if args.command == "pdf":
        context["pdf"] = args.pdf
        context["t"] = args.t
        if args.grid is not None:
            lo, hi, points = args.grid
            context["grid"] = {"lo": lo, "hi": hi, "points": int(points)}
    return context


def main(argv: Optional[List[str]] = None) -> int:
    """
    CLI 진입점

    Returns:
        종료 코드 (0 성공, 1 실패; argparse 사용 오류는 2)
    """
    logging.basicConfig(level=settings.log_level.upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)

    try:
        context = context_from_args(args)
    except (ValidationError, ValueError) as e:
        print(f"error: invalid parameters: {e}", file=sys.stderr)
        return 1

    manager = SkillManager()
    skill_name = manager.find_skill_for_task(args.command)
    if skill_name is None:
        print(f"error: no skill provides '{args.command}'", file=sys.stderr)
        return 1
    logger.debug(f"dispatching {args.command} to {skill_name}")
    try:
        response = manager.execute_skill(skill_name, args.command, context)
    except (ValidationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    if not response['success']:
        print(f"error: {args.command} failed: {response['error']}", file=sys.stderr)
        return 1

    out_dir = context.get("out_dir") or settings.output_dir
    print(f"{args.command}: outputs written to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
