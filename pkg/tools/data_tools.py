"""
가격 데이터 로드 도구
CSV 파일에서 종가 시계열을 읽어 PriceSeries로 변환
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Tuple, Union

import pandas as pd

from tools.detrend import PriceSeries
from tools.errors import DataFormatError

logger = logging.getLogger(__name__)

CLOSE_COLUMN_NAMES = ("close", "adj close", "adj_close", "price", "value")


def _detect_delimiter(path: Path) -> str:
    """세미콜론/탭/쉼표 중 첫 데이터 행들에 나타나는 구분자 (없으면 단일 열)"""
    with open(path, "r", encoding="utf-8") as f:
        sample = [line for _, line in zip(range(20), f) if line.strip()]
    for delimiter in (";", "\t", ","):
        if any(delimiter in line for line in sample):
            return delimiter
    return ","


def _read_raw(path: Path) -> pd.DataFrame:
    """모든 셀을 문자열로 읽기 (빈 행 유지, 행 번호 = 인덱스 + 1)"""
    try:
        return pd.read_csv(path, sep=_detect_delimiter(path), header=None, dtype=str,
                           skip_blank_lines=False, keep_default_na=False)
    except pd.errors.ParserError as e:
        raise DataFormatError(str(path), [], f"inconsistent columns ({e})")


def _to_float(cell: str) -> Optional[float]:
    try:
        return float(str(cell).strip())
    except ValueError:
        return None


def _pick_close_column(header: List[str]) -> int:
    lowered = [h.strip().lower() for h in header]
    for name in CLOSE_COLUMN_NAMES:
        if name in lowered:
            return lowered.index(name)
    return len(header) - 1


def load_prices(path: Union[str, Path], lenient: bool = False) -> PriceSeries:
    """
    가격 CSV 로드

    (label, close) 두 열 또는 close 단일 열. 헤더 행은 자동 감지합니다.
    헤더에 close/adj close 열이 있으면 그 열을, 없으면 마지막 열을 종가로 씁니다.

    Args:
        path: CSV 파일 경로
        lenient: True면 잘못된 행을 경고 후 건너뜀, False면 DataFormatError

    Returns:
        PriceSeries

    Raises:
        DataFormatError: 빈 파일, 잘못된 행, 유효 가격 3개 미만
    """
    path = Path(path)
    if not path.exists():
        raise DataFormatError(str(path), [], "file not found")
    if path.stat().st_size == 0 or not path.read_text(encoding="utf-8").strip():
        raise DataFormatError(str(path), [], "empty file")

    raw = _read_raw(path)
    rows = [(idx + 1, [str(c) for c in row]) for idx, row in enumerate(raw.itertuples(index=False))]
    rows = [(line, cells) for line, cells in rows if any(c.strip() for c in cells)]
    if not rows:
        raise DataFormatError(str(path), [], "empty file")

    first_line, first_cells = rows[0]
    close_col = len(first_cells) - 1
    if _to_float(first_cells[close_col]) is None:
        close_col = _pick_close_column(first_cells)
        logger.info(f"{path.name}: header detected at line {first_line}, close column '{first_cells[close_col].strip()}'")
        rows = rows[1:]

    values: List[float] = []
    labels: List[str] = []
    problems: List[Tuple[int, str]] = []
    for line, cells in rows:
        if close_col >= len(cells):
            problems.append((line, "missing close column"))
            continue
        price = _to_float(cells[close_col])
        if price is None:
            problems.append((line, f"non-numeric price '{cells[close_col].strip()}'"))
        elif not math.isfinite(price):
            problems.append((line, f"non-finite price {price}"))
        elif price <= 0:
            problems.append((line, f"non-positive price {price}"))
        else:
            values.append(price)
            labels.append(cells[0].strip() if len(cells) > 1 else str(line))

    if problems:
        if not lenient:
            raise DataFormatError(str(path), problems, f"{len(problems)} malformed rows")
        for line, reason in problems:
            logger.warning(f"{path.name} line {line}: {reason} (skipped)")

    if len(values) < 3:
        raise DataFormatError(str(path), problems, f"need at least 3 valid prices, got {len(values)}")

    logger.info(f"{path.name}: loaded {len(values)} prices")
    return PriceSeries(values=values, labels=labels)
