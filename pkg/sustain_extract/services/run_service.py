"""Run service: solve and oracle-check orchestration for one run configuration."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, Optional, Tuple

from sustain_extract.config import RunConfig
from sustain_extract.core.enums import ExitCode
from sustain_extract.core.errors import ConfigError
from sustain_extract.kernel.oracle import GapReport, OracleResult, compare, enumerate_maxmin
from sustain_extract.kernel.solver import SolveResult, solve_constant_consumption
from sustain_extract.services.report_service import ReportService

logger = logging.getLogger(__name__)


class RunService:
    def __init__(self, run: RunConfig, out_dir: str | Path):
        self.run = run
        self.reports = ReportService(out_dir)

    def solve(self) -> SolveResult:
        run = self.run
        return solve_constant_consumption(run.economy, run.resources, run.demand, run.solver)

    def solve_and_write(self) -> Tuple[SolveResult, Dict[str, object]]:
        """Solve and write trajectory.csv, residuals.csv and summary.json."""
        result = self.solve()
        self.reports.write_trajectory(result.trajectory)
        self.reports.write_residuals(result.report)
        summary = {
            "command": "solve",
            "resources": result.trajectory.labels,
            **result.summary(),
        }
        self.reports.write_json(summary, "summary.json")
        return result, summary

    def enumerate(self) -> OracleResult:
        run = self.run
        if run.oracle is None:
            raise ConfigError("run config has no 'oracle' section")
        return enumerate_maxmin(run.oracle, run.economy, run.resources, run.demand)

    def oracle_check(self, max_gap: float) -> Tuple[GapReport, ExitCode, Dict[str, object]]:
        """Enumerate first so guard violations fail before any solve."""
        oracle = self.enumerate()
        result = self.solve()
        gap = compare(result, oracle)
        passed = gap.within(max_gap)
        summary: Dict[str, object] = {
            "command": "oracle-check",
            "max_gap": max_gap,
            "passed": passed,
            "gap": gap.summary(),
            "oracle": oracle.summary(),
            "solver": result.summary(),
        }
        self.reports.write_json(summary, "gap_report.json")
        self.reports.write_trajectory(oracle.trajectory, "oracle_trajectory.csv")
        if not passed:
            logger.warning("Solver-oracle gap %.3e exceeds %.3e", gap.relative_gap, max_gap)
        return gap, ExitCode.OK if passed else ExitCode.ORACLE_GAP, summary


def resolve_out_dir(run: RunConfig, out: Optional[str]) -> Path:
    return Path(out or run.output_dir or "output")
