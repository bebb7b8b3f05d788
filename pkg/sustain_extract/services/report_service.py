"""Report service: writes trajectories, residuals and summaries to disk.

CSV floats carry 17 significant digits and JSON floats use the shortest
round-trip representation, so every emitted number reads back exactly.
"""

from __future__ import annotations

import json
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from sustain_extract.kernel.rules import RuleResidualReport
from sustain_extract.models.trajectory import Trajectory

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"

TRAJECTORY_COLUMNS = [
    "t", "resource", "price", "adjusted_price", "margin", "extraction", "stock",
    "growth", "income", "investment", "consumption", "capital",
]
RESIDUAL_COLUMNS = [
    "t", "resource", "hotelling_rel", "present_value_abs", "user_cost_abs",
    "hartwick_abs", "consumption_drift",
]


def to_jsonable(value: Any) -> Any:
    """Plain Python values; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def dumps_json(value: Any) -> str:
    return json.dumps(to_jsonable(value), indent=2, sort_keys=True, allow_nan=False) + "\n"


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    """Long format: one row per (t, resource); aggregate columns repeat."""
    rows = traj.steps + 1
    n = traj.n
    frame = pd.DataFrame({
        "t": np.repeat(np.arange(rows), n),
        "resource": np.tile(np.asarray(traj.labels, dtype=object), rows),
        "price": traj.price.ravel(),
        "adjusted_price": traj.adjusted_price.ravel(),
        "margin": traj.margin.ravel(),
        "extraction": traj.extraction.ravel(),
        "stock": traj.stock.ravel(),
        "growth": traj.growth.ravel(),
        "income": np.repeat(traj.income, n),
        "investment": np.repeat(traj.investment, n),
        "consumption": np.repeat(traj.consumption, n),
        "capital": np.repeat(traj.capital, n),
    })
    return frame[TRAJECTORY_COLUMNS]


def residual_frame(report: RuleResidualReport) -> pd.DataFrame:
    steps, n = report.hotelling.shape
    consumption = np.asarray(report.consumption, dtype=float)
    base = consumption[0]
    drift = np.abs(consumption[:steps] - base) / max(1.0, abs(base))
    labels = report.labels or [str(j) for j in range(n)]
    frame = pd.DataFrame({
        "t": np.repeat(np.arange(steps), n),
        "resource": np.tile(np.asarray(labels, dtype=object), steps),
        "hotelling_rel": report.hotelling.ravel(),
        "present_value_abs": np.abs(report.present_value).ravel(),
        "user_cost_abs": np.abs(report.user_cost).ravel(),
        "hartwick_abs": np.repeat(np.abs(report.hartwick), n),
        "consumption_drift": np.repeat(drift, n),
    })
    return frame[RESIDUAL_COLUMNS]


class ReportService:
    def __init__(self, out_dir: str | Path):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def write_frame(self, frame: pd.DataFrame, name: str) -> Path:
        path = self.out_dir / name
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info("Wrote %s (%d rows)", path, len(frame))
        return path

    def write_json(self, payload: Any, name: str) -> Path:
        path = self.out_dir / name
        path.write_text(dumps_json(payload), encoding="utf-8")
        logger.info("Wrote %s", path)
        return path

    def write_trajectory(self, traj: Trajectory, name: str = "trajectory.csv") -> Path:
        return self.write_frame(trajectory_frame(traj), name)

    def write_residuals(self, report: RuleResidualReport, name: str = "residuals.csv") -> Path:
        return self.write_frame(residual_frame(report), name)
