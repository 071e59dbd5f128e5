"""
예외 정의
voltail 전체에서 사용하는 예외 계층
"""

from typing import Any, Dict, List, Optional, Tuple


class VoltailError(ValueError):
    """voltail 기본 예외"""


class DomainError(VoltailError):
    """수학적 정의역 밖의 인자 (예: 음수 분산)"""


class DeterministicLimit(VoltailError):
    """
    κ = 0 (결정론적 변동성 극한) 신호

    정상분포 Π(v)가 θ에서의 델타 함수가 되므로 형태 상수를 숫자로 돌려줄 수 없습니다.
    """

    def __init__(self, theta: float):
        self.theta = theta
        super().__init__(f"kappa=0: deterministic volatility limit at v={theta}")


class QuadratureError(VoltailError):
    """적분이 요구 허용오차로 수렴하지 않음"""

    def __init__(self, message: str, achieved: float):
        self.achieved = achieved
        super().__init__(f"{message} (achieved abserr={achieved:.3e})")


class SimulationError(VoltailError):
    """Monte Carlo 스텝에서 유한하지 않은 값 발생"""

    def __init__(self, path: int, step: int, message: str = "non-finite value"):
        self.path = path
        self.step = step
        super().__init__(f"{message} at path {path}, step {step}")


class FitError(VoltailError):
    """피팅 실패 - 가장 좋은 점을 함께 전달"""

    def __init__(self, message: str, best: Optional[Dict[str, Any]] = None):
        self.best = best or {}
        super().__init__(f"{message}; best point: {self.best}")


class DataFormatError(VoltailError):
    """
    입력 파일 형식 오류

    Args:
        path: 입력 파일 경로
        problems: (행 번호, 사유) 목록
    """

    def __init__(self, path: str, problems: List[Tuple[int, str]], message: str = ""):
        self.path = path
        self.problems = problems
        details = "; ".join(f"line {line}: {reason}" for line, reason in problems[:20])
        if len(problems) > 20:
            details += f"; ... ({len(problems) - 20} more)"
        head = message or "invalid input"
        super().__init__(f"{path}: {head}" + (f" [{details}]" if details else ""))
