# vertexlab/reports.py
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime
from fractions import Fraction

import numpy as np
import pandas as pd
from dateutil import tz

logger = logging.getLogger(__name__)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    return value


def utc_timestamp() -> str:
    return datetime.now(tz.tzutc()).isoformat()


@dataclass
class CheckReport:
    check: str
    params: dict
    residual: float
    tolerance: float
    passed: bool = None
    details: dict = field(default_factory=dict)
    timestamp: str = field(default_factory=utc_timestamp)

    def __post_init__(self):
        if self.passed is None:
            self.passed = bool(self.residual <= self.tolerance)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.check}: {status} residual={self.residual:.3g} tolerance={self.tolerance:.3g}"


def write_report(report: CheckReport, output_dir: str) -> str:
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, f"{report.check}.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    logger.info(f"Report written to {path}")
    return path


def write_table(rows, output_dir: str, name: str) -> str:
    """Write a list of records (or a DataFrame) as CSV; complex columns are split into re/im."""
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
    for column in list(frame.columns):
        if frame[column].dtype.kind == "c":
            frame[f"{column}_re"] = frame[column].to_numpy().real
            frame[f"{column}_im"] = frame[column].to_numpy().imag
            frame = frame.drop(columns=column)
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, f"{name}.csv")
    frame.to_csv(path, index=False)
    logger.info(f"Table with {len(frame)} rows written to {path}")
    return path
