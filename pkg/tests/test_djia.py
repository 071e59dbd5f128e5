"""
DJIA 1976-2006 일별 종가 재현 (데이터 파일이 있을 때만 실행)
"""

import json
from pathlib import Path

import pytest

from app import main
from config import settings

DJIA = Path(settings.djia_file)

pytestmark = pytest.mark.skipif(not DJIA.exists(), reason=f"{DJIA} not available")


def test_lag_one_tsallis_parameters(tmp_path):
    assert main(["analyze", "--input", str(DJIA), "--lags", "1", "--bins", "100", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    fit = report["lags"]["1"]["fit"]
    assert fit["beta"] == pytest.approx(0.861, abs=0.1)
    assert fit["theta"] == pytest.approx(1.03, abs=0.1)
    assert report["drift"]["mu"] == pytest.approx(4.35e-4, rel=0.15)
