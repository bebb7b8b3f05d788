"""Sweep service: Cartesian product of scalar parameter values, one solve per cell.

Cells run on a thread pool; ``Executor.map`` returns results in cell order, so
the written CSVs do not depend on scheduling.
"""

from __future__ import annotations

import itertools
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd
from pydantic import ValidationError

from sustain_extract.config import RunConfig, SweepConfig
from sustain_extract.core.errors import ConfigError, SustainExtractError
from sustain_extract.kernel.solver import solve_constant_consumption
from sustain_extract.services.report_service import ReportService

logger = logging.getLogger(__name__)

_PATH = re.compile(r"^(\w+)((?:\[\d+\])*)$")

METRICS = [
    "consumption_level",
    "iterations",
    "max_terminal_mismatch",
    "max_abs_hotelling",
    "max_abs_user_cost",
    "max_abs_hartwick",
    "consumption_drift",
    "mean_margin",
]

_SECTION = {
    "interest_rate": "economy",
    "capital0": "economy",
    "dt": "economy",
    "stock0": "resources",
    "scale": "demand",
    "exponents": "demand",
    "intercepts": "demand",
    "slopes": "demand",
    "price_impact_scale": "demand",
}


@dataclass(frozen=True)
class SweepCell:
    index: int
    params: Dict[str, float]


def apply_override(data: Dict[str, Any], parameter: str, value: float) -> None:
    """Set ``parameter`` (e.g. ``exponents[0][1]``) in a dumped RunConfig."""
    name, raw_index = _PATH.match(parameter).groups()
    index = [int(i) for i in re.findall(r"\d+", raw_index)]
    try:
        if name == "stock0":
            data["resources"][index[0]]["stock0"] = value
        elif _SECTION[name] == "economy":
            data["economy"][name] = value
        elif not index:
            data["demand"][name] = value
        else:
            target = data["demand"][name]
            if target is None:
                raise ConfigError(f"demand system has no '{name}' to sweep")
            for i in index[:-1]:
                target = target[i]
            target[index[-1]] = value
    except IndexError as exc:
        raise ConfigError(f"sweep parameter {parameter!r} is out of range") from exc


class SweepService:
    def __init__(self, run: RunConfig, out_dir: str | Path, threads: int = 1):
        if run.sweep is None:
            raise ConfigError("run config has no 'sweep' section")
        self.run = run
        self.sweep: SweepConfig = run.sweep
        self.threads = max(1, threads)
        self.reports = ReportService(out_dir)

    def cells(self) -> List[SweepCell]:
        names = [axis.parameter for axis in self.sweep.axes]
        grid = itertools.product(*(axis.values for axis in self.sweep.axes))
        return [SweepCell(i, dict(zip(names, values))) for i, values in enumerate(grid)]

    def cell_config(self, cell: SweepCell) -> RunConfig:
        data = self.run.model_dump(mode="json", exclude={"sweep"})
        for parameter, value in cell.params.items():
            apply_override(data, parameter, value)
        try:
            return RunConfig.model_validate(data)
        except ValidationError as exc:
            raise ConfigError(f"cell {cell.index} is not a valid economy: {exc}") from exc

    def _solve_cell(self, cell: SweepCell) -> Dict[str, Any]:
        row: Dict[str, Any] = {"cell": cell.index, **cell.params, "status": "ok"}
        try:
            run = self.cell_config(cell)
            result = solve_constant_consumption(run.economy, run.resources, run.demand, run.solver)
        except SustainExtractError as exc:
            logger.warning("Sweep cell %d failed: %s", cell.index, exc)
            row["status"] = exc.code
            row.update({metric: np.nan for metric in METRICS})
            return row
        residuals = result.report.summary()
        traj = result.trajectory
        row.update({
            "consumption_level": result.consumption_level,
            "iterations": result.iterations,
            "max_terminal_mismatch": float(np.max(np.abs(result.terminal_mismatch))),
            "max_abs_hotelling": residuals["max_abs_hotelling"],
            "max_abs_user_cost": residuals["max_abs_user_cost"],
            "max_abs_hartwick": residuals["max_abs_hartwick"],
            "consumption_drift": residuals["consumption_drift"],
            "mean_margin": float(np.nanmean(traj.margin[: traj.steps])),
        })
        return row

    def execute(self) -> pd.DataFrame:
        cells = self.cells()
        logger.info("Sweeping %d cells on %d threads", len(cells), self.threads)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            rows = list(pool.map(self._solve_cell, cells))
        columns = ["cell", *(axis.parameter for axis in self.sweep.axes), "status", *METRICS]
        return pd.DataFrame(rows, columns=columns)

    def execute_and_write(self) -> pd.DataFrame:
        """Write sweep.csv (one row per cell) and sweep_long.csv (one row per metric)."""
        wide = self.execute()
        self.reports.write_frame(wide, "sweep.csv")
        keys = ["cell", *(axis.parameter for axis in self.sweep.axes), "status"]
        long = wide.melt(id_vars=keys, value_vars=METRICS, var_name="metric", value_name="value")
        long = long.sort_values(["cell"], kind="stable").reset_index(drop=True)
        self.reports.write_frame(long, "sweep_long.csv")
        return wide
