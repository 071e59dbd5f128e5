"""
Report Writer
TSV(플롯용 곡선)와 JSON(피팅/지표) 출력, 출력 파일별로 쓰기를 직렬화
"""

import json
import logging
import math
import threading
from collections import defaultdict
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

TSV_FLOAT_FORMAT = "%.10g"


def _clean(value: Any) -> Any:
    """JSON 직렬화 가능한 값으로 변환 (numpy 스칼라/배열, NaN → null)"""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


class ReportWriter:
    """
    출력 디렉토리 아래에 TSV/JSON 파일을 쓰는 도우미

    같은 파일에 대한 동시 쓰기는 파일별 잠금으로 직렬화됩니다.
    """

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self._locks: Dict[Path, threading.Lock] = defaultdict(threading.Lock)
        self._registry_lock = threading.Lock()

    def _lock_for(self, path: Path) -> threading.Lock:
        with self._registry_lock:
            return self._locks[path]

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def write_tsv(self, name: str, frame: pd.DataFrame) -> Path:
        """
        DataFrame을 탭 구분 파일로 저장

        Args:
            name: 파일 이름 (out_dir 기준)
            frame: 저장할 표

        Returns:
            Path: 저장된 파일 경로
        """
        target = self.path(name)
        with self._lock_for(target):
            frame.to_csv(target, sep="\t", index=False, float_format=TSV_FLOAT_FORMAT, lineterminator="\n")
        logger.info(f"wrote {target} ({len(frame)} rows)")
        return target

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        """
        dict를 JSON으로 저장 (키 정렬, 결정론적 출력)

        Args:
            name: 파일 이름
            payload: 저장할 내용

        Returns:
            Path: 저장된 파일 경로
        """
        target = self.path(name)
        text = json.dumps(_clean(payload), ensure_ascii=False, indent=2, sort_keys=True)
        with self._lock_for(target):
            target.write_text(text + "\n", encoding="utf-8")
        logger.info(f"wrote {target}")
        return target
