import json
from fractions import Fraction

import numpy as np
import pandas as pd

from vertexlab.reports import CheckReport, write_report, write_table


def test_passed_follows_residual_and_tolerance():
    assert CheckReport("kronig", {}, 0.0, 0.0).passed
    assert not CheckReport("kronig", {}, 1e-3, 1e-6).passed
    assert not CheckReport("kronig", {}, 0.0, 1.0, passed=False).passed


def test_json_is_sorted_and_serializes_numbers():
    report = CheckReport(
        "anyon-corr",
        {"nu": np.float64(1.5), "k": Fraction(3, 2)},
        np.float64(2e-9),
        1e-8,
        details={"value": 1 + 2j, "ladder": np.array([0.1, 0.05]), "ratio": float("inf")},
    )
    data = json.loads(report.to_json())
    assert list(data) == sorted(data)
    assert data["params"] == {"k": "3/2", "nu": 1.5}
    assert data["details"]["value"] == {"re": 1.0, "im": 2.0}
    assert data["details"]["ladder"] == [0.1, 0.05]
    assert data["details"]["ratio"] == "inf"
    assert data["passed"] is True


def test_summary_line():
    summary = CheckReport("cs-eigen", {}, 1e-7, 1e-5).summary()
    assert summary.startswith("cs-eigen: PASS")
    assert "tolerance=1e-05" in summary


def test_write_report(tmp_path):
    path = write_report(CheckReport("kms-project", {}, 0.0, 1e-8), str(tmp_path / "reports"))
    assert path.endswith("kms-project.json")
    assert json.loads(open(path, encoding="utf-8").read())["check"] == "kms-project"


def test_write_table_splits_complex_columns(tmp_path):
    rows = [{"eps": 0.1, "value": 1 + 1j}, {"eps": 0.05, "value": 2 - 1j}]
    path = write_table(rows, str(tmp_path), "ladder")
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["eps", "value_re", "value_im"]
    assert frame["value_im"].tolist() == [1.0, -1.0]
