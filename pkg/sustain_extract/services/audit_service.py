"""Audit service: rebuilds a Trajectory from an observed time series.

Interest, growth and the demand Jacobian come from the run configuration;
the data supply prices, quantities, stocks and optionally consumption.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from sustain_extract.config import RunConfig
from sustain_extract.core.errors import DomainError, InputDataError
from sustain_extract.kernel.externality import externality_margin
from sustain_extract.kernel.rules import RuleResidualReport, audit_trajectory
from sustain_extract.models.trajectory import Trajectory, accumulate_capital, empty_rows

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("t", "resource", "price", "quantity", "stock")
QUANTITY_ALIAS = "extraction"


class AuditService:
    def __init__(self, run: RunConfig):
        self.run = run
        self.names = [r.name for r in run.resources]

    def load(self, path: str | Path) -> pd.DataFrame:
        """Read and validate the audit CSV."""
        try:
            frame = pd.read_csv(path, dtype={"resource": str})
        except FileNotFoundError as exc:
            raise InputDataError(f"data file not found: {path}") from exc
        except pd.errors.EmptyDataError as exc:
            raise InputDataError(f"data file {path} is empty") from exc

        if "quantity" not in frame.columns and QUANTITY_ALIAS in frame.columns:
            frame = frame.rename(columns={QUANTITY_ALIAS: "quantity"})
        missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
        if missing:
            raise InputDataError(f"missing required columns: {', '.join(missing)}")
        if frame.empty:
            raise InputDataError("no data rows; required columns: " + ", ".join(REQUIRED_COLUMNS))

        numeric = ["price", "quantity", "stock"] + (["consumption"] if "consumption" in frame else [])
        for column in numeric:
            frame[column] = pd.to_numeric(frame[column], errors="coerce")
        try:
            frame["t"] = pd.to_numeric(frame["t"], errors="raise").astype(int)
        except (ValueError, TypeError) as exc:
            raise InputDataError("column 't' must hold integer step indices") from exc
        frame["resource"] = frame["resource"].map(self._resource_index)
        return frame

    def _resource_index(self, label: str) -> int:
        label = str(label)
        if label in self.names:
            return self.names.index(label)
        if label.isdigit() and int(label) < len(self.names):
            return int(label)
        raise InputDataError(f"unknown resource {label!r}; expected one of {self.names}")

    def _steps(self, frame: pd.DataFrame) -> np.ndarray:
        steps: Optional[np.ndarray] = None
        for j in range(len(self.names)):
            t = frame.loc[frame["resource"] == j, "t"].to_numpy()
            if t.size == 0:
                raise InputDataError(f"no rows for resource {self.names[j]!r}")
            if np.any(np.diff(t) <= 0):
                raise InputDataError(f"time index not strictly increasing for {self.names[j]!r}")
            if steps is None:
                steps = t
            elif not np.array_equal(steps, t):
                raise InputDataError("every resource must be observed at the same steps")
        if steps.size < 2:
            raise InputDataError("at least two time steps are needed for an audit")
        return steps

    def build_trajectory(self, frame: pd.DataFrame) -> Trajectory:
        run = self.run
        economy, resources, demand = run.economy, run.resources, run.demand
        steps = self._steps(frame)
        rows, n = steps.size, len(resources)

        def pivot(column: str) -> np.ndarray:
            table = frame.pivot(index="t", columns="resource", values=column)
            return table.loc[steps, list(range(n))].to_numpy(dtype=float)

        price, quantity, stock = pivot("price"), pivot("quantity"), pivot("stock")
        margin, adjusted = empty_rows(rows, n), empty_rows(rows, n)
        for t in range(rows):
            if not (np.all(np.isfinite(quantity[t])) and np.all(np.isfinite(price[t]))):
                continue
            try:
                report = externality_margin(demand, quantity[t], run.audit.margin_mode, price=price[t])
            except DomainError as exc:
                logger.warning("No margin at step %d: %s", int(steps[t]), exc)
                continue
            margin[t], adjusted[t] = report.margin, report.adjusted_price

        clipped = np.maximum(np.nan_to_num(stock), 0.0)
        growth = np.column_stack([r.growth.value(clipped[:, j]) for j, r in enumerate(resources)])
        revenue = np.sum(price * quantity, axis=1)

        if "consumption" in frame.columns:
            consumption = frame.groupby("t")["consumption"].first().loc[steps].to_numpy(dtype=float)
            capital, income, investment = self._capital_from_consumption(revenue, consumption)
            level = float(consumption[0])
        else:
            income0 = economy.rate(0) * economy.capital0 + revenue[0]
            level = float(income0 - adjusted[0] @ (quantity[0] - growth[0]))
            capital, income, investment = accumulate_capital(economy, revenue, level)
            consumption = np.where(np.isfinite(income), level, np.nan)

        return Trajectory(
            economy=economy,
            resources=list(resources),
            demand=demand,
            price=price,
            adjusted_price=adjusted,
            margin=margin,
            extraction=quantity,
            stock=stock,
            growth=growth,
            capital=capital,
            income=income,
            investment=investment,
            consumption=consumption,
            consumption_level=level,
        )

    def _capital_from_consumption(
        self, revenue: np.ndarray, consumption: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        economy = self.run.economy
        rows = revenue.size
        capital, income, investment = np.empty(rows), np.empty(rows), np.empty(rows)
        capital[0] = economy.capital0
        for t in range(rows):
            income[t] = economy.rate(t) * capital[t] + revenue[t]
            investment[t] = income[t] - consumption[t]
            if t + 1 < rows:
                capital[t + 1] = capital[t] + investment[t] * economy.dt
        return capital, income, investment

    def audit(self, path: str | Path) -> Tuple[Trajectory, RuleResidualReport]:
        trajectory = self.build_trajectory(self.load(path))
        report = audit_trajectory(trajectory)
        logger.info("Audited %d steps from %s", trajectory.steps, path)
        return trajectory, report
