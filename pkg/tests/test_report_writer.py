"""
ReportWriter 출력 형식 테스트
"""

import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd

from utils.report_writer import ReportWriter


def test_tsv_format(tmp_path):
    writer = ReportWriter(tmp_path / "out")
    path = writer.write_tsv("curve.tsv", pd.DataFrame({"x": [0.1, 1.0 / 3.0], "density": [1e-20, 2.0]}))
    assert path.read_text(encoding="utf-8") == "x\tdensity\n0.1\t1e-20\n0.3333333333\t2\n"


def test_json_cleaning(tmp_path):
    writer = ReportWriter(tmp_path)
    payload = {"b": np.float64(1.5), "a": [np.int64(2), float("nan")], "c": np.array([1.0, np.inf]),
               "path": tmp_path, 5: "key"}
    text = writer.write_json("r.json", payload).read_text(encoding="utf-8")
    data = json.loads(text)
    assert data == {"a": [2, None], "b": 1.5, "c": [1.0, None], "path": str(tmp_path), "5": "key"}
    assert text.index('"5"') < text.index('"a"') < text.index('"b"')


def test_concurrent_writes(tmp_path):
    writer = ReportWriter(tmp_path)
    frames = {f"lag{t}.tsv": pd.DataFrame({"v": np.arange(1000) * t}) for t in range(1, 9)}
    with ThreadPoolExecutor(max_workers=4) as pool:
        list(pool.map(lambda item: writer.write_tsv(*item), frames.items()))
    for name, frame in frames.items():
        assert pd.read_csv(tmp_path / name, sep="\t")["v"].tolist() == frame["v"].tolist()
