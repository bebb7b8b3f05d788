"""Exhaustive max-min search over gridded extraction sequences.

For a fixed sequence the capital path is affine in the consumption level,
K_t = alpha_t - beta_t·C̄, so the best constant consumption it supports is the
largest C̄ keeping every K_t >= 0. Investment follows from K dynamics alone;
the Hartwick rule never enters the search.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.optimize import brentq

from sustain_extract.core.enums import DemandKind, TerminalKind
from sustain_extract.core.errors import (
    DomainError,
    EnumerationGuardError,
    InfeasiblePathError,
    MismatchedEconomyError,
)
from sustain_extract.kernel.externality import adjusted_prices, externality_margin
from sustain_extract.kernel.rules import hotelling_residual
from sustain_extract.kernel.solver import SolveResult
from sustain_extract.models.demand import DemandSystem
from sustain_extract.models.economy import EconomySpec
from sustain_extract.models.resource import ResourceSpec
from sustain_extract.models.trajectory import (
    Trajectory,
    accumulate_capital,
    empty_rows,
    step_stocks,
)

logger = logging.getLogger(__name__)

ZERO_FLOOR = 1e-12


class OracleConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    periods: int = Field(ge=1, le=5)
    grid_points: int = Field(ge=1, le=80)
    bounds: Optional[List[Tuple[float, float]]] = None  # per resource, default [0, X_0]
    cbar_tolerance: float = Field(default=1e-6, gt=0)
    stock_tolerance: float = Field(default=1e-9, ge=0)
    max_enumeration: int = Field(default=10_000_000, ge=1)
    chunk_size: int = Field(default=1 << 18, ge=1)

    @model_validator(mode="after")
    def _check_bounds(self) -> "OracleConfig":
        for lo, hi in self.bounds or []:
            if lo < 0 or hi < lo:
                raise ValueError(f"grid bounds need 0 <= lo <= hi, got ({lo}, {hi})")
        return self

    def grids(self, resources: Sequence[ResourceSpec]) -> List[np.ndarray]:
        bounds = self.bounds or [(0.0, r.stock0) for r in resources]
        if len(bounds) != len(resources):
            raise MismatchedEconomyError(
                f"{len(bounds)} grid bounds for {len(resources)} resources"
            )
        return [np.linspace(lo, hi, self.grid_points) for lo, hi in bounds]


@dataclass
class OracleResult:
    best_sequence: np.ndarray      # (T, n)
    best_cbar: float
    trajectory: Trajectory
    adjusted_price_factors: np.ndarray   # P̂(t+1)/P̂(t), (T-1, n)
    enumerated: int
    feasible: int
    config: OracleConfig
    grids: List[np.ndarray] = field(default_factory=list)

    @property
    def periods(self) -> int:
        return self.best_sequence.shape[0]

    def summary(self) -> Dict[str, object]:
        return {
            "best_cbar": float(self.best_cbar),
            "best_sequence": self.best_sequence.tolist(),
            "adjusted_price_factors": self.adjusted_price_factors.tolist(),
            "enumerated": int(self.enumerated),
            "feasible": int(self.feasible),
        }


@dataclass
class GapReport:
    cbar_solver: float
    cbar_hartwick: float
    cbar_oracle: float
    relative_gap: float
    extraction_gap: np.ndarray       # solver minus oracle, (T, n)
    extraction_gap_cells: float
    hotelling_residual: np.ndarray   # on the oracle's best sequence, (T-1, n)
    hotelling_tolerance: np.ndarray
    hotelling_ok: bool

    def within(self, max_gap: float) -> bool:
        return bool(np.isfinite(self.relative_gap) and abs(self.relative_gap) <= max_gap)

    def summary(self) -> Dict[str, object]:
        return {
            "cbar_solver": self.cbar_solver,
            "cbar_hartwick": self.cbar_hartwick,
            "cbar_oracle": self.cbar_oracle,
            "relative_gap": self.relative_gap,
            "max_extraction_gap": float(np.max(np.abs(self.extraction_gap))),
            "extraction_gap_cells": self.extraction_gap_cells,
            "extraction_gap": self.extraction_gap.tolist(),
            "hotelling_residual": self.hotelling_residual.tolist(),
            "hotelling_tolerance": self.hotelling_tolerance.tolist(),
            "hotelling_ok": self.hotelling_ok,
        }


# ── Per-sequence evaluation ──


def _zero_floor(resources: Sequence[ResourceSpec], grids: Optional[List[np.ndarray]] = None):
    tops = [g[-1] for g in grids] if grids else [r.stock0 for r in resources]
    return ZERO_FLOOR * np.maximum(1.0, np.asarray(tops, dtype=float))


def _revenue_rows(demand: DemandSystem, Q: np.ndarray, floor: np.ndarray) -> np.ndarray:
    """sum_j p_j(Q)·Q_j for each row of Q; NaN where a price is not positive.

    Isoelastic zeros are lifted to ``floor`` so corner revenue stays finite.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if demand.kind == DemandKind.LINEAR:
        p = demand.a[None, :] - Q @ demand.B.T
    else:
        Q = np.maximum(Q, floor[None, :])
        log_p = np.linalg.solve(demand.eta, (np.log(Q) - np.log(demand.A)[None, :]).T).T
        with np.errstate(over="ignore"):
            p = np.exp(log_p)
    revenue = np.sum(p * Q, axis=1)
    bad = np.any(~np.isfinite(p) | (p <= 0), axis=1)
    revenue[bad] = np.nan
    return revenue


def _stock_path(
    resources: Sequence[ResourceSpec], sequence: np.ndarray, dt: float
) -> Tuple[np.ndarray, np.ndarray]:
    T, n = sequence.shape
    stock = empty_rows(T + 1, n)
    growth = empty_rows(T + 1, n)
    stock[0] = [r.stock0 for r in resources]
    for t in range(T):
        stock[t + 1], growth[t] = step_stocks(resources, stock[t], sequence[t], dt)
    growth[T] = [r.growth.value(x) for r, x in zip(resources, np.maximum(stock[T], 0.0))]
    return stock, growth


def _stock_floor(economy: EconomySpec, resources: Sequence[ResourceSpec], tolerance: float):
    stock0 = np.array([r.stock0 for r in resources])
    slack = tolerance * stock0
    if economy.terminal.kind == TerminalKind.STOCK_TARGET:
        terminal = np.asarray(economy.terminal.targets(len(resources)), dtype=float) - slack
    else:
        terminal = -slack
    return -slack, terminal


def _capital_coefficients(economy: EconomySpec, revenue: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """alpha_t, beta_t for t = 1..T with K_t = alpha_t - beta_t·C̄."""
    T = revenue.shape[-1]
    dt = economy.dt
    alpha = np.empty(revenue.shape)
    beta = np.empty(T)
    a = np.full(revenue.shape[:-1], economy.capital0, dtype=float)
    b = 0.0
    for t in range(T):
        g = economy.growth_factor(t)
        a = a * g + revenue[..., t] * dt
        b = b * g + dt
        alpha[..., t] = a
        beta[t] = b
    return alpha, beta


def feasible_cbar(
    sequence,
    economy: EconomySpec,
    resources: Sequence[ResourceSpec],
    demand: DemandSystem,
    tolerance: float = 1e-6,
    stock_tolerance: float = 0.0,
) -> Optional[float]:
    """Largest constant consumption keeping K_t >= 0 for t = 1..T.

    ``stock_tolerance`` is relative to X_0. Returns None when the sequence
    drives a stock below its floor or meets a nonpositive price.
    """
    sequence = np.asarray(sequence, dtype=float)
    if sequence.ndim == 1:
        sequence = sequence.reshape(-1, 1)
    if sequence.shape[1] != len(resources) or sequence.shape[0] < 1:
        raise DomainError(f"sequence must have shape (T, {len(resources)})")
    if not np.all(np.isfinite(sequence)) or np.any(sequence < 0):
        raise DomainError("extraction sequence must be finite and >= 0")

    stock, _ = _stock_path(resources, sequence, economy.dt)
    path_floor, terminal_floor = _stock_floor(economy, resources, stock_tolerance)
    if np.any(stock[1:-1] < path_floor) or np.any(stock[-1] < terminal_floor):
        return None
    revenue = _revenue_rows(demand, sequence, _zero_floor(resources))
    if np.any(np.isnan(revenue)):
        return None

    alpha, beta = _capital_coefficients(economy, revenue)

    def lowest_capital(cbar: float) -> float:
        return float(np.min(alpha - beta * cbar))

    if lowest_capital(0.0) <= 0:
        return 0.0
    hi = float(np.max(alpha / beta))
    if lowest_capital(hi) >= 0:
        return hi
    return float(brentq(lowest_capital, 0.0, hi, xtol=tolerance * max(1.0, hi)))


# ── Enumeration ──


def enumerate_maxmin(
    config: OracleConfig,
    economy: EconomySpec,
    resources: Sequence[ResourceSpec],
    demand: DemandSystem,
) -> OracleResult:
    """Best constant consumption over every gridded sequence of ``config.periods`` steps.

    Sequences are visited in lexicographic order of grid indices (period 0
    most significant, then resource order); ties keep the earliest.
    """
    n, T = len(resources), config.periods
    if demand.n != n:
        raise MismatchedEconomyError(f"{n} resources but demand system has n={demand.n}")
    size = config.grid_points ** (T * n)
    if size > config.max_enumeration:
        raise EnumerationGuardError(
            f"enumeration of {config.grid_points}^{T * n} = {size} sequences exceeds "
            f"the guard of {config.max_enumeration}"
        )

    grids = config.grids(resources)
    G = config.grid_points
    per_period = G ** n
    # one row per joint extraction vector, resource 0 most significant
    combo_index = np.arange(per_period)
    combos = np.stack(
        [grids[j][(combo_index // G ** (n - 1 - j)) % G] for j in range(n)], axis=1
    )
    combo_revenue = _revenue_rows(demand, combos, _zero_floor(resources, grids))

    path_floor, terminal_floor = _stock_floor(economy, resources, config.stock_tolerance)
    beta = _capital_coefficients(economy, np.zeros(T))[1]
    stock0 = np.array([r.stock0 for r in resources])

    best_index, best_value, feasible = -1, -np.inf, 0
    for start in range(0, size, config.chunk_size):
        index = np.arange(start, min(start + config.chunk_size, size))
        digits = np.stack([(index // per_period ** (T - 1 - t)) % per_period for t in range(T)], axis=1)

        ok = np.ones(index.size, dtype=bool)
        stock = np.broadcast_to(stock0, (index.size, n)).copy()
        for t in range(T):
            flow = combos[digits[:, t]]
            clipped = np.maximum(stock, 0.0)
            growth = np.stack([r.growth.value(clipped[:, j]) for j, r in enumerate(resources)], axis=1)
            stock = stock + (growth - flow) * economy.dt
            floor = terminal_floor if t == T - 1 else path_floor
            ok &= np.all(stock >= floor, axis=1)

        revenue = combo_revenue[digits]
        ok &= ~np.any(np.isnan(revenue), axis=1)
        alpha = _capital_coefficients(economy, np.nan_to_num(revenue))[0]
        value = np.min(alpha / beta[None, :], axis=1)
        value = np.where(ok, np.maximum(value, 0.0), -np.inf)
        feasible += int(np.count_nonzero(ok))

        local = int(np.argmax(value))
        if value[local] > best_value:
            best_value, best_index = float(value[local]), int(index[local])
        logger.debug("Oracle chunk at %d: best so far %.10g", start, best_value)

    if best_index < 0:
        raise InfeasiblePathError("no gridded sequence satisfies the stock constraints")

    sequence = np.stack(
        [combos[(best_index // per_period ** (T - 1 - t)) % per_period] for t in range(T)]
    )
    cbar = feasible_cbar(
        sequence, economy, resources, demand, config.cbar_tolerance, config.stock_tolerance
    )
    trajectory = oracle_trajectory(sequence, cbar, economy, resources, demand)
    with np.errstate(invalid="ignore", divide="ignore"):
        factors = trajectory.adjusted_price[1:T] / trajectory.adjusted_price[: T - 1]
    logger.info(
        "Oracle enumerated %d sequences (%d feasible): C̄*=%.10g at %s",
        size, feasible, cbar, sequence.tolist(),
    )
    return OracleResult(
        best_sequence=sequence,
        best_cbar=cbar,
        trajectory=trajectory,
        adjusted_price_factors=factors,
        enumerated=size,
        feasible=feasible,
        config=config,
        grids=grids,
    )


def oracle_trajectory(
    sequence,
    cbar: float,
    economy: EconomySpec,
    resources: Sequence[ResourceSpec],
    demand: DemandSystem,
) -> Trajectory:
    """Trajectory of a gridded sequence at consumption C̄; corner rows carry NaN margins."""
    sequence = np.atleast_2d(np.asarray(sequence, dtype=float))
    T, n = sequence.shape
    stock, growth = _stock_path(resources, sequence, economy.dt)
    extraction = empty_rows(T + 1, n)
    extraction[:T] = sequence
    price, margin, adjusted = empty_rows(T + 1, n), empty_rows(T + 1, n), empty_rows(T + 1, n)
    for t in range(T):
        if np.all(sequence[t] > 0):
            report = externality_margin(demand, sequence[t])
            price[t], margin[t], adjusted[t] = report.market_price, report.margin, report.adjusted_price
        elif demand.kind == DemandKind.LINEAR:
            price[t] = demand.a - demand.B @ sequence[t]

    revenue = np.full(T + 1, np.nan)
    revenue[:T] = _revenue_rows(demand, sequence, _zero_floor(resources))
    capital, income, investment = accumulate_capital(economy, revenue, cbar)
    return Trajectory(
        economy=economy,
        resources=list(resources),
        demand=demand,
        price=price,
        adjusted_price=adjusted,
        margin=margin,
        extraction=extraction,
        stock=stock,
        growth=growth,
        capital=capital,
        income=income,
        investment=investment,
        consumption=np.where(np.isfinite(income), cbar, np.nan),
        consumption_level=cbar,
    )


# ── Solver comparison ──


def _cell_change(demand: DemandSystem, Q: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """Relative change of each P̂_j when Q_j moves by one grid cell."""
    base = adjusted_prices(demand, Q)
    change = np.zeros(Q.size)
    for j in range(Q.size):
        moved = Q.copy()
        # step toward the interior when Q_j sits at a cell-width from zero
        moved[j] = Q[j] + cells[j] if Q[j] <= cells[j] else Q[j] - cells[j]
        try:
            change[j] = abs(adjusted_prices(demand, moved)[j] - base[j]) / abs(base[j])
        except DomainError:
            change[j] = np.nan
    return change


def _hotelling_on_grid(oracle: OracleResult) -> Tuple[np.ndarray, np.ndarray, bool]:
    traj = oracle.trajectory
    T, n = oracle.periods, traj.n
    cells = np.array([g[1] - g[0] if g.size > 1 else 0.0 for g in oracle.grids])
    residual = np.full((max(T - 1, 0), n), np.nan)
    tolerance = np.full((max(T - 1, 0), n), np.nan)
    change = np.full((T, n), np.nan)
    for t in range(T):
        if np.all(oracle.best_sequence[t] > 0):
            change[t] = _cell_change(traj.demand, oracle.best_sequence[t], cells)
    for t in range(T - 1):
        for j in range(n):
            if np.isfinite(traj.adjusted_price[t, j]) and np.isfinite(traj.adjusted_price[t + 1, j]):
                residual[t, j] = hotelling_residual(traj, t, j)
        tolerance[t] = 0.5 * np.maximum(change[t], change[t + 1])
    checked = np.isfinite(residual) & np.isfinite(tolerance)
    ok = bool(np.all(np.abs(residual[checked]) <= tolerance[checked] + 1e-12))
    return residual, tolerance, ok


def compare(
    solver_result: SolveResult,
    oracle_result: OracleResult,
) -> GapReport:
    """Gap between a solved path and the enumerated optimum on the same economy."""
    solved = solver_result.trajectory
    found = oracle_result.trajectory
    if solved.steps != oracle_result.periods:
        raise MismatchedEconomyError(
            f"solver horizon {solved.steps} differs from oracle periods {oracle_result.periods}"
        )
    if (
        solved.economy != found.economy
        or list(solved.resources) != list(found.resources)
        or solved.demand != found.demand
    ):
        raise MismatchedEconomyError("solver and oracle were run on different economies")

    T = oracle_result.periods
    sequence = np.maximum(solved.extraction[:T], 0.0)
    cbar = feasible_cbar(
        sequence,
        solved.economy,
        solved.resources,
        solved.demand,
        oracle_result.config.cbar_tolerance,
        max(solved.economy.terminal.tolerance, oracle_result.config.stock_tolerance),
    )
    cbar_solver = float("nan") if cbar is None else cbar
    best = oracle_result.best_cbar
    if best != 0:
        gap = (cbar_solver - best) / best
    else:
        gap = cbar_solver - best

    extraction_gap = solved.extraction[:T] - oracle_result.best_sequence
    cells = np.array([g[1] - g[0] if g.size > 1 else 0.0 for g in oracle_result.grids])
    with np.errstate(invalid="ignore", divide="ignore"):
        in_cells = np.abs(extraction_gap) / np.where(cells > 0, cells, np.nan)[None, :]
    residual, tolerance, ok = _hotelling_on_grid(oracle_result)

    report = GapReport(
        cbar_solver=cbar_solver,
        cbar_hartwick=float(solver_result.consumption_level),
        cbar_oracle=float(best),
        relative_gap=float(gap),
        extraction_gap=extraction_gap,
        extraction_gap_cells=float(np.nanmax(in_cells)) if np.any(np.isfinite(in_cells)) else 0.0,
        hotelling_residual=residual,
        hotelling_tolerance=tolerance,
        hotelling_ok=ok,
    )
    logger.info("Solver-oracle gap %.3e (C̄ solver %.10g, oracle %.10g)", gap, cbar_solver, best)
    return report
