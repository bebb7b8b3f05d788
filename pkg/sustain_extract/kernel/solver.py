"""Constant-consumption extraction paths by shooting on the initial adjusted price.

Adjusted prices step forward exactly by the modified Hotelling factor
(1 + r·dt)/(1 + G'·dt); extraction and market prices are recovered from the
adjusted price through the demand system, and P̂_0 is searched until the
terminal stock condition holds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sustain_extract.core.enums import DemandKind
from sustain_extract.core.errors import (
    BracketNotFoundError,
    ConfigError,
    DemandError,
    DivergenceError,
    DomainError,
    InfeasiblePathError,
    MarginalRevenueError,
    MaxIterationsError,
    RootFindError,
    SolverError,
    UnattainablePriceError,
)
from sustain_extract.kernel.externality import adjusted_prices, externality_margin
from sustain_extract.kernel.rules import RuleResidualReport, audit_trajectory
from sustain_extract.models.demand import (
    DemandSystem,
    as_vector,
    demand_quantity,
)
from sustain_extract.models.economy import EconomySpec
from sustain_extract.models.resource import ResourceSpec
from sustain_extract.models.trajectory import (
    Trajectory,
    accumulate_capital,
    empty_rows,
    step_stocks,
)

logger = logging.getLogger(__name__)

MAX_RESOURCES = 3
_DIVERGENCE_PATIENCE = 5
_SENSITIVITY_STEP = 1e-6


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    shooting_tolerance: float = Field(default=1e-8, gt=0)
    max_outer_iterations: int = Field(default=200, ge=1)
    initial_price: Optional[List[float]] = None
    bracket_expansion: float = Field(default=2.0, gt=1)
    max_bracket_expansions: int = Field(default=60, ge=1)
    damping: float = Field(default=0.5, gt=0, le=1)
    inner_tolerance: float = Field(default=1e-12, gt=0)
    max_inner_iterations: int = Field(default=100, ge=1)
    check_monotonicity: bool = False
    monotonicity_samples: int = Field(default=8, ge=8)


@dataclass(frozen=True)
class MarketState:
    extraction: np.ndarray
    price: np.ndarray
    margin: np.ndarray
    adjusted_price: np.ndarray


@dataclass
class SolveResult:
    trajectory: Trajectory
    report: RuleResidualReport
    consumption_level: float
    iterations: int
    terminal_mismatch: np.ndarray
    initial_adjusted_price: np.ndarray
    converged: bool
    bracket: Optional[Tuple[float, float]] = None

    def summary(self) -> dict:
        return {
            "consumption_level": float(self.consumption_level),
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "terminal_mismatch": [float(x) for x in self.terminal_mismatch],
            "max_terminal_mismatch": float(np.max(np.abs(self.terminal_mismatch))),
            "initial_adjusted_price": [float(x) for x in self.initial_adjusted_price],
            "bracket": list(self.bracket) if self.bracket else None,
            "residuals": self.report.summary(),
        }


# ── Single-step relations ──


def step_user_cost(
    X: float,
    price_now: float,
    price_next: float,
    r: float,
    growth_slope: float,
    dt: float = 1.0,
) -> float:
    """Extraction amount solving P̂_t·Q·(1+r dt) = P̂_{t+1}(1+G'dt)(X - Q)."""
    if X <= 0 or price_now <= 0 or price_next <= 0:
        raise DomainError(
            f"user-cost step needs X > 0 and positive prices, got X={X}, "
            f"P̂_t={price_now}, P̂_next={price_next}"
        )
    kept = price_next * (1.0 + growth_slope * dt)
    spent = price_now * (1.0 + r * dt)
    if kept <= 0 or spent <= 0:
        raise DomainError(f"compounding factors must be positive, got {spent}, {kept}")
    return kept * X / (spent + kept)


def _market_state(demand: DemandSystem, target: np.ndarray, Q: np.ndarray) -> MarketState:
    report = externality_margin(demand, Q)
    return MarketState(
        extraction=Q, price=report.market_price, margin=report.margin, adjusted_price=target
    )


def _isoelastic_newton(
    demand: DemandSystem,
    target: np.ndarray,
    q_guess: Optional[np.ndarray],
    tolerance: float,
    max_iterations: int,
) -> np.ndarray:
    """Damped Newton on log Q for MR(Q) = P̂ with cross-elastic isoelastic demand."""
    s = demand.price_impact_scale
    M = np.linalg.inv(demand.eta)
    log_A = np.log(demand.A)

    if q_guess is not None and np.all(q_guess > 0):
        z = np.log(q_guess)
    else:
        factor = 1.0 + s * np.diag(M)
        start = target / np.where(factor > 0, factor, 1.0)
        z = np.log(demand_quantity(demand, start))

    def evaluate(z: np.ndarray):
        Q = np.exp(z)
        p = np.exp(M @ (z - log_A))
        revenue = p * Q
        u = M.T @ revenue
        mr = p + s * u / Q
        return Q, p, revenue, u, mr / target - 1.0

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        Q, p, revenue, u, F = evaluate(z)
        norm = float(np.max(np.abs(F)))
        for iteration in range(max_iterations):
            if norm <= tolerance:
                break
            dmr = np.diag(p) @ M + (s / Q)[:, None] * (
                M.T @ np.diag(revenue) @ M + M.T @ np.diag(revenue) - np.diag(u)
            )
            try:
                step = np.linalg.solve(dmr / target[:, None], -F)
            except np.linalg.LinAlgError as exc:
                raise RootFindError(f"singular marginal-revenue Jacobian at Q={Q}") from exc
            lam = 1.0
            while lam > 2.0 ** -30:
                trial = evaluate(z + lam * step)
                trial_norm = float(np.max(np.abs(trial[-1])))
                if np.isfinite(trial_norm) and trial_norm < norm:
                    break
                lam *= 0.5
            else:
                raise RootFindError(f"damped Newton stalled at residual {norm:.3e}")
            z = z + lam * step
            Q, p, revenue, u, F = trial
            norm = trial_norm
        else:
            if norm > tolerance:
                raise RootFindError(
                    f"market-state recovery did not converge in {max_iterations} iterations "
                    f"(residual {norm:.3e})"
                )

    slope = np.diag(np.diag(p) @ M + (s / Q)[:, None] * (
        M.T @ np.diag(revenue) @ M + M.T @ np.diag(revenue) - np.diag(u)
    )) / Q
    if np.any(slope >= 0):
        raise MarginalRevenueError(f"marginal revenue not decreasing in own extraction at Q={Q}")
    return Q


def recover_market_state(
    demand: DemandSystem,
    target,
    q_guess: Optional[np.ndarray] = None,
    tolerance: float = 1e-12,
    max_iterations: int = 100,
) -> MarketState:
    """Find Q with adjusted price P̂(Q) equal to ``target``."""
    target = as_vector(demand, target, "adjusted price")
    if np.any(target <= 0):
        raise DomainError(f"adjusted prices must be > 0, got {target}")
    s = demand.price_impact_scale

    if s == 0:
        try:
            Q = demand_quantity(demand, target)
        except DomainError as exc:
            raise UnattainablePriceError(str(exc), [0] * demand.n) from exc
        if np.any(Q <= 0):
            raise UnattainablePriceError(
                f"adjusted price {target} above the choke price", (Q <= 0).astype(int)
            )
    elif demand.kind == DemandKind.LINEAR:
        slope = demand.B + s * demand.B.T
        if np.any(np.linalg.eigvalsh(0.5 * (slope + slope.T)) <= 0):
            raise MarginalRevenueError("linear marginal revenue is not monotone decreasing")
        Q = np.linalg.solve(slope, demand.a - target)
        price = demand.a - demand.B @ Q
        direction = np.where(Q <= 0, 1, np.where(price <= 0, -1, 0))
        if np.any(direction != 0):
            raise UnattainablePriceError(
                f"adjusted price {target} outside the attainable range", direction
            )
    elif demand.is_diagonal:
        own = np.diag(demand.eta)
        factor = 1.0 + s / own
        if np.any(factor <= 0):
            raise MarginalRevenueError(
                f"isoelastic recovery needs own exponents below -{s}, got {own}"
            )
        Q = demand.A * (target / factor) ** own
    else:
        Q = _isoelastic_newton(demand, target, q_guess, tolerance, max_iterations)

    return _market_state(demand, target, Q)


# ── Forward stepping ──


@dataclass
class _Path:
    adjusted: np.ndarray
    extraction: np.ndarray
    price: np.ndarray
    margin: np.ndarray
    stock: np.ndarray
    growth: np.ndarray
    infeasible: np.ndarray


def _march(
    economy: EconomySpec,
    resources: Sequence[ResourceSpec],
    demand: DemandSystem,
    initial: np.ndarray,
    config: SolverConfig,
) -> _Path:
    T, n, dt = economy.horizon_steps, demand.n, economy.dt
    stock0 = np.array([r.stock0 for r in resources])
    floor = -economy.terminal.tolerance * stock0

    adjusted = empty_rows(T + 1, n)
    extraction, price, margin = empty_rows(T + 1, n), empty_rows(T + 1, n), empty_rows(T + 1, n)
    stock, growth = empty_rows(T + 1, n), empty_rows(T + 1, n)
    infeasible = np.zeros(n, dtype=bool)

    adjusted[0] = initial
    stock[0] = stock0
    guess = None
    for t in range(T + 1):
        try:
            state = recover_market_state(
                demand, adjusted[t], guess, config.inner_tolerance, config.max_inner_iterations
            )
        except DomainError:
            if t < T:
                raise
            logger.debug("No market state for terminal adjusted price %s", adjusted[t])
        else:
            extraction[t], price[t], margin[t] = state.extraction, state.price, state.margin
            guess = state.extraction

        clipped = np.maximum(stock[t], 0.0)
        if t == T:
            growth[t] = [r.growth.value(x) for r, x in zip(resources, clipped)]
            break

        stock[t + 1], growth[t] = step_stocks(resources, stock[t], extraction[t], dt)
        carry = 1.0 + np.array([r.growth.slope(x) for r, x in zip(resources, clipped)]) * dt
        if np.any(carry <= 0):
            raise DomainError(f"1 + G'·dt must stay positive, got {carry} at t={t}")
        adjusted[t + 1] = adjusted[t] * economy.growth_factor(t) / carry
        if t + 1 < T:
            infeasible |= stock[t + 1] < floor

    return _Path(adjusted, extraction, price, margin, stock, growth, infeasible)


def _assemble(
    economy: EconomySpec,
    resources: Sequence[ResourceSpec],
    demand: DemandSystem,
    adjusted: np.ndarray,
    extraction: np.ndarray,
    price: np.ndarray,
    margin: np.ndarray,
    stock: np.ndarray,
    growth: np.ndarray,
    consumption_level: Optional[float] = None,
) -> Trajectory:
    """Attach capital accounts; C̄ defaults to Y_0 minus the t = 0 Hartwick investment."""
    revenue = np.sum(price * extraction, axis=1)
    if consumption_level is None:
        income0 = economy.rate(0) * economy.capital0 + revenue[0]
        consumption_level = float(income0 - adjusted[0] @ (extraction[0] - growth[0]))
    capital, income, investment = accumulate_capital(economy, revenue, consumption_level)
    consumption = np.where(np.isfinite(income), consumption_level, np.nan)
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
        consumption=consumption,
        consumption_level=consumption_level,
    )


def _check_system(resources: Sequence[ResourceSpec], demand: DemandSystem) -> None:
    if len(resources) != demand.n:
        raise ConfigError(f"{len(resources)} resources but demand system has n={demand.n}")
    if demand.n > MAX_RESOURCES:
        raise ConfigError(f"at most {MAX_RESOURCES} resources are supported, got {demand.n}")


def propagate(
    economy: EconomySpec,
    resources: Sequence[ResourceSpec],
    demand: DemandSystem,
    initial_adjusted_price,
    config: Optional[SolverConfig] = None,
) -> Trajectory:
    """Step P̂ forward by the modified Hotelling factor from P̂_0."""
    config = config or SolverConfig()
    _check_system(resources, demand)
    initial = as_vector(demand, initial_adjusted_price, "initial adjusted price")
    path = _march(economy, resources, demand, initial, config)
    if np.any(path.infeasible):
        bad = [int(j) for j in np.flatnonzero(path.infeasible)]
        raise InfeasiblePathError(f"stock driven below tolerance mid-path for resources {bad}", bad)
    return _assemble(
        economy, resources, demand, path.adjusted, path.extraction,
        path.price, path.margin, path.stock, path.growth,
    )


# ── Shooting ──


def _terminal_targets(economy: EconomySpec, resources: Sequence[ResourceSpec]) -> np.ndarray:
    targets = economy.terminal.targets(len(resources))
    if len(targets) != len(resources):
        raise ConfigError(f"{len(targets)} target stocks for {len(resources)} resources")
    return np.asarray(targets, dtype=float)


def _mismatch_function(
    economy: EconomySpec,
    resources: Sequence[ResourceSpec],
    demand: DemandSystem,
    config: SolverConfig,
) -> Callable[[np.ndarray], np.ndarray]:
    """Relative terminal mismatch (X_T - target)/X_0 as a function of P̂_0.

    Infeasible mid-path stocks and too-low unattainable prices map to -inf,
    too-high unattainable prices to +inf, resources not at fault to NaN.
    """
    targets = _terminal_targets(economy, resources)
    stock0 = np.array([r.stock0 for r in resources])

    def mismatch(initial: np.ndarray) -> np.ndarray:
        try:
            path = _march(economy, resources, demand, np.asarray(initial, float), config)
        except UnattainablePriceError as exc:
            return np.array(
                [math.inf if d > 0 else -math.inf if d < 0 else math.nan for d in exc.direction]
            )
        out = (path.stock[-1] - targets) / stock0
        out[path.infeasible] = -math.inf
        return out

    return mismatch


def _initial_guess(
    economy: EconomySpec,
    resources: Sequence[ResourceSpec],
    demand: DemandSystem,
    config: SolverConfig,
) -> np.ndarray:
    if config.initial_price is not None:
        guess = as_vector(demand, config.initial_price, "initial_price")
        if np.any(guess <= 0):
            raise ConfigError("initial_price entries must be > 0")
        return guess
    targets = _terminal_targets(economy, resources)
    stock0 = np.array([r.stock0 for r in resources])
    # equal split of the stock that has to go
    Q = np.maximum(stock0 - targets, 1e-3 * stock0) / (economy.horizon_steps * economy.dt)
    for _ in range(config.max_bracket_expansions):
        try:
            guess = adjusted_prices(demand, Q)
        except DemandError:
            guess = None
        if guess is not None and np.all(guess > 0):
            return guess
        Q = 0.5 * Q
    raise BracketNotFoundError("no admissible starting adjusted price found")


def _check_monotone(f: Callable[[float], float], lo: float, hi: float, samples: int) -> None:
    points = np.geomspace(lo, hi, samples)
    values = [f(float(x)) for x in points]
    if not all(b >= a for a, b in zip(values, values[1:])):
        raise SolverError(f"terminal stock not monotone in P̂_0 over [{lo}, {hi}]: {values}")


def _shoot_scalar(
    f: Callable[[float], float],
    guess: float,
    tolerance: float,
    config: SolverConfig,
) -> Tuple[float, float, int, Tuple[float, float]]:
    """Log-space bisection; returns (root, mismatch, iterations, bracket)."""
    value = f(guess)
    if math.isnan(value):
        raise SolverError("terminal mismatch undefined at the starting price")
    if abs(value) <= tolerance:
        return guess, value, 0, (guess, guess)

    factor = config.bracket_expansion
    lo = hi = guess
    f_lo = f_hi = value
    if value < 0:
        for _ in range(config.max_bracket_expansions):
            lo, hi, f_lo = hi, hi * factor, f_hi
            f_hi = f(hi)
            if f_hi > 0:
                break
        else:
            raise BracketNotFoundError(
                f"terminal condition not bracketed: mismatch stays {f_hi:.3e} up to P̂_0={hi:.6g}"
            )
    else:
        for _ in range(config.max_bracket_expansions):
            lo, hi, f_hi = lo / factor, lo, f_lo
            f_lo = f(lo)
            if f_lo < 0:
                break
        else:
            raise BracketNotFoundError(
                f"terminal condition not bracketed: mismatch stays {f_lo:.3e} down to P̂_0={lo:.6g}"
            )
    bracket = (lo, hi)
    logger.debug("Bracketed P̂_0 in [%.6g, %.6g]", lo, hi)

    if config.check_monotonicity:
        _check_monotone(f, lo, hi, config.monotonicity_samples)

    for iteration in range(1, config.max_outer_iterations + 1):
        mid = math.sqrt(lo * hi)
        value = f(mid)
        if math.isnan(value):
            raise SolverError(f"terminal mismatch undefined at P̂_0={mid}")
        if abs(value) <= tolerance:
            return mid, value, iteration, bracket
        if value < 0:
            lo, f_lo = mid, value
        else:
            hi, f_hi = mid, value
        if hi / lo - 1.0 < 1e-15:
            if math.isinf(f_lo) or math.isinf(f_hi):
                # the sign change is a jump to an infeasible path, not a root
                raise BracketNotFoundError(
                    f"no finite sign change of the terminal mismatch near P̂_0={mid:.17g} "
                    f"(mismatch {f_lo:.3e} below, {f_hi:.3e} above)"
                )
            break
    raise MaxIterationsError(
        f"bisection stopped after {iteration} iterations with mismatch {value:.3e}"
    )


def _feasible_start(
    f: Callable[[np.ndarray], np.ndarray],
    z: np.ndarray,
    config: SolverConfig,
) -> Tuple[np.ndarray, np.ndarray]:
    """Move log P̂_0 until every terminal mismatch is finite.

    Each coordinate keeps its own bracket between the last point blamed as too
    low (-inf) and too high (+inf); once both ends are known it bisects. When
    every blamed resource points the same way all coordinates move together.
    """
    shift = math.log(config.bracket_expansion)
    low = np.full(z.size, -math.inf)
    high = np.full(z.size, math.inf)
    F = f(np.exp(z))
    for _ in range(config.max_bracket_expansions):
        if np.all(np.isfinite(F)):
            return z, F
        blame = np.where(F == -math.inf, 1.0, np.where(F == math.inf, -1.0, 0.0))
        signs = set(blame[blame != 0])
        if len(signs) == 1:
            blame = np.full(z.size, signs.pop())
        elif not signs:
            raise SolverError(f"terminal mismatch undefined at P̂_0={np.exp(z)}")

        low = np.where(blame > 0, z, low)
        high = np.where(blame < 0, z, high)
        # a stale bracket left behind by other coordinates moving
        stale = low >= high
        low = np.where(stale & (blame < 0), -math.inf, low)
        high = np.where(stale & (blame > 0), math.inf, high)

        bounded = np.isfinite(low) & np.isfinite(high)
        with np.errstate(invalid="ignore"):
            target = np.where(bounded, 0.5 * (low + high), z + blame * shift)
        z = np.where(blame != 0, target, z)
        if np.any(bounded & (high - low < 1e-12)):
            break
        F = f(np.exp(z))
    raise BracketNotFoundError(f"no feasible starting point for P̂_0 (mismatch {F})")


def _shoot_vector(
    f: Callable[[np.ndarray], np.ndarray],
    guess: np.ndarray,
    tolerance: float,
    config: SolverConfig,
) -> Tuple[np.ndarray, np.ndarray, int]:
    """Damped fixed point in log P̂_0, each coordinate driven by its own mismatch."""
    z, F = _feasible_start(f, np.log(guess), config)

    best = float(np.max(np.abs(F)))
    stall = 0
    for iteration in range(1, config.max_outer_iterations + 1):
        if best <= tolerance and float(np.max(np.abs(F))) <= tolerance:
            return np.exp(z), F, iteration - 1

        sensitivity = np.empty_like(z)
        for j in range(z.size):
            bumped = z.copy()
            bumped[j] += _SENSITIVITY_STEP
            sensitivity[j] = (f(np.exp(bumped))[j] - F[j]) / _SENSITIVITY_STEP
        if not np.all(np.isfinite(sensitivity)) or np.any(sensitivity <= 0):
            raise DivergenceError(f"terminal stock sensitivity lost monotonicity: {sensitivity}")

        step = -config.damping * F / sensitivity
        lam = 1.0
        while True:
            trial = f(np.exp(z + lam * step))
            if np.all(np.isfinite(trial)):
                break
            lam *= 0.5
            if lam < 2.0 ** -30:
                raise DivergenceError("fixed-point step left the feasible region")
        z, F = z + lam * step, trial

        current = float(np.max(np.abs(F)))
        logger.debug("Fixed point iteration %d: max mismatch %.3e", iteration, current)
        if current < best:
            best, stall = current, 0
        else:
            stall += 1
            if stall >= _DIVERGENCE_PATIENCE:
                raise DivergenceError(
                    f"mismatch stopped improving for {stall} iterations (at {current:.3e})"
                )
    if float(np.max(np.abs(F))) <= tolerance:
        return np.exp(z), F, config.max_outer_iterations
    raise MaxIterationsError(
        f"fixed point did not converge in {config.max_outer_iterations} iterations "
        f"(mismatch {np.max(np.abs(F)):.3e})"
    )


def solve_constant_consumption(
    economy: EconomySpec,
    resources: Sequence[ResourceSpec],
    demand: DemandSystem,
    config: Optional[SolverConfig] = None,
) -> SolveResult:
    """Shoot on P̂_0 until the terminal condition holds; attach the rule audit."""
    config = config or SolverConfig()
    _check_system(resources, demand)
    tolerance = min(economy.terminal.tolerance, config.shooting_tolerance)
    mismatch = _mismatch_function(economy, resources, demand, config)
    guess = _initial_guess(economy, resources, demand, config)

    bracket = None
    if demand.n == 1:
        root, _, iterations, bracket = _shoot_scalar(
            lambda x: float(mismatch(np.array([x]))[0]), float(guess[0]), tolerance, config
        )
        initial = np.array([root])
    else:
        initial, _, iterations = _shoot_vector(mismatch, guess, tolerance, config)

    trajectory = propagate(economy, resources, demand, initial, config)
    report = audit_trajectory(trajectory)
    targets = _terminal_targets(economy, resources)
    terminal = (trajectory.stock[-1] - targets) / trajectory.stock[0]
    converged = bool(np.max(np.abs(terminal)) <= tolerance)
    logger.info(
        "Converged after %d iterations: P̂_0=%s, C̄=%.10g, max mismatch %.3e",
        iterations, initial, trajectory.consumption_level, float(np.max(np.abs(terminal))),
    )
    return SolveResult(
        trajectory=trajectory,
        report=report,
        consumption_level=trajectory.consumption_level,
        iterations=iterations,
        terminal_mismatch=terminal,
        initial_adjusted_price=initial,
        converged=converged,
        bracket=bracket,
    )


def solve_user_cost_mode(
    economy: EconomySpec,
    resources: Sequence[ResourceSpec],
    demand: DemandSystem,
    adjusted_price_path,
) -> SolveResult:
    """Extract by the user-cost rule along an exogenous adjusted-price path.

    The horizon is the path length minus one.
    """
    _check_system(resources, demand)
    path = np.asarray(adjusted_price_path, dtype=float)
    if path.ndim == 1:
        path = path.reshape(-1, 1)
    if path.ndim != 2 or path.shape[1] != demand.n or path.shape[0] < 2:
        raise DomainError(f"price path must have shape (T+1, {demand.n}) with T >= 1")
    if not np.all(np.isfinite(path)) or np.any(path <= 0):
        raise DomainError("adjusted price path must be positive")

    T, n, dt = path.shape[0] - 1, demand.n, economy.dt
    extraction, price, margin = empty_rows(T + 1, n), empty_rows(T + 1, n), empty_rows(T + 1, n)
    stock, growth = empty_rows(T + 1, n), empty_rows(T + 1, n)
    stock[0] = [r.stock0 for r in resources]
    for t in range(T):
        clipped = np.maximum(stock[t], 0.0)
        amount = np.array([
            step_user_cost(
                stock[t, j], path[t, j], path[t + 1, j],
                economy.rate(t), resources[j].growth.slope(clipped[j]), dt,
            )
            for j in range(n)
        ])
        extraction[t] = amount / dt
        stock[t + 1], growth[t] = step_stocks(resources, stock[t], extraction[t], dt)
        report = externality_margin(demand, extraction[t])
        price[t], margin[t] = report.market_price, report.margin
    growth[T] = [r.growth.value(x) for r, x in zip(resources, np.maximum(stock[T], 0.0))]

    trajectory = _assemble(economy, resources, demand, path, extraction, price, margin, stock, growth)
    report = audit_trajectory(trajectory)
    terminal = (stock[-1] - _terminal_targets(economy, resources)) / stock[0]
    return SolveResult(
        trajectory=trajectory,
        report=report,
        consumption_level=trajectory.consumption_level,
        iterations=0,
        terminal_mismatch=terminal,
        initial_adjusted_price=path[0].copy(),
        converged=bool(np.all(np.abs(terminal) <= economy.terminal.tolerance)),
    )
