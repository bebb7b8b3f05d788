"""Rule residuals over a trajectory.

Residuals are evaluated on externality-adjusted prices P̂ with G' taken at the
start-of-period stock:

* hotelling      [P̂(t+1)(1+G'dt)/(1+r dt) - P̂(t)] / P̂(t)
* present value  the same without the division by P̂(t)
* user cost      P̂(t)·Q dt·(1+r dt) - P̂(t+1)(1+G'dt)(X - Q dt)
* hartwick       I(t) - sum_j P̂_j (Q_j - G_j)
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from sustain_extract.core.errors import DomainError
from sustain_extract.models.trajectory import Trajectory

logger = logging.getLogger(__name__)


@dataclass
class CostateSeries:
    """pi(t) = beta(t) (pi_0 = 1), psi_j(t) = pi(t)·P̂_j(t)."""

    pi: np.ndarray
    psi: np.ndarray
    beta: np.ndarray
    psi_residual: np.ndarray   # psi(t+1)(1 + G'dt) - psi(t)


@dataclass
class RuleResidualReport:
    hotelling: np.ndarray
    present_value: np.ndarray
    user_cost: np.ndarray
    hartwick: np.ndarray
    consumption: np.ndarray
    consumption_drift: float
    costates: CostateSeries
    labels: List[str] = field(default_factory=list)

    def summary(self) -> Dict[str, float]:
        return {
            "max_abs_hotelling": max_abs(self.hotelling),
            "max_abs_present_value": max_abs(self.present_value),
            "max_abs_user_cost": max_abs(self.user_cost),
            "max_abs_hartwick": max_abs(self.hartwick),
            "max_abs_costate": max_abs(self.costates.psi_residual),
            "consumption_drift": float(self.consumption_drift),
        }


def max_abs(values: np.ndarray) -> float:
    """Largest finite |value|, NaN when nothing is finite."""
    arr = np.asarray(values, dtype=float)
    finite = arr[np.isfinite(arr)]
    if finite.size == 0:
        return float("nan")
    return float(np.max(np.abs(finite)))


def _check_step(traj: Trajectory, t: int) -> None:
    if t < 0 or t + 1 > traj.steps:
        raise IndexError(f"step {t} needs t+1 <= {traj.steps}")


def present_value_residual(traj: Trajectory, t: int, j: int) -> float:
    _check_step(traj, t)
    now = float(traj.adjusted_price[t, j])
    if now <= 0:
        raise DomainError(f"adjusted price must be > 0 at t={t}, j={j}, got {now}")
    dt = traj.economy.dt
    carried = traj.adjusted_price[t + 1, j] * (1.0 + traj.growth_slope(t, j) * dt)
    return float(carried / traj.economy.growth_factor(t) - now)


def hotelling_residual(traj: Trajectory, t: int, j: int) -> float:
    return present_value_residual(traj, t, j) / float(traj.adjusted_price[t, j])


def user_cost_rule_residual(traj: Trajectory, t: int, j: int) -> float:
    _check_step(traj, t)
    dt = traj.economy.dt
    amount = traj.extraction[t, j] * dt
    extracted = traj.adjusted_price[t, j] * amount * traj.economy.growth_factor(t)
    retained = (
        traj.adjusted_price[t + 1, j]
        * (1.0 + traj.growth_slope(t, j) * dt)
        * (traj.stock[t, j] - amount)
    )
    return float(extracted - retained)


def hartwick_investment(traj: Trajectory, t: int) -> float:
    """Rule-implied investment I*(t) = sum_j P̂_j (Q_j - G_j(X_j))."""
    net = traj.extraction[t] - traj.growth[t]
    return float(traj.adjusted_price[t] @ net)


def hartwick_residual(traj: Trajectory, t: int) -> float:
    return float(traj.investment[t]) - hartwick_investment(traj, t)


def consumption_drift(consumption: np.ndarray) -> float:
    """max_t |C(t) - C(0)| / max(1, |C(0)|) over finite entries."""
    consumption = np.asarray(consumption, dtype=float)
    base = float(consumption[0])
    finite = consumption[np.isfinite(consumption)]
    if finite.size == 0 or not np.isfinite(base):
        return float("nan")
    return float(np.max(np.abs(finite - base)) / max(1.0, abs(base)))


def consumption_series(traj: Trajectory) -> Tuple[np.ndarray, float]:
    consumption = traj.income - traj.investment
    return consumption, consumption_drift(consumption)


def costates(traj: Trajectory) -> CostateSeries:
    rows = traj.steps + 1
    beta = np.ones(rows)
    for t in range(1, rows):
        beta[t] = beta[t - 1] / traj.economy.growth_factor(t - 1)
    pi = beta.copy()
    psi = pi[:, None] * traj.adjusted_price
    residual = np.empty((traj.steps, traj.n))
    for t in range(traj.steps):
        carried = 1.0 + traj.growth_slopes(t) * traj.economy.dt
        residual[t] = psi[t + 1] * carried - psi[t]
    return CostateSeries(pi=pi, psi=psi, beta=beta, psi_residual=residual)


def audit_trajectory(traj: Trajectory) -> RuleResidualReport:
    """Evaluate every rule at every step t = 0..T-1."""
    steps, n = traj.steps, traj.n
    hotelling = np.full((steps, n), np.nan)
    present = np.full((steps, n), np.nan)
    user_cost = np.full((steps, n), np.nan)
    hartwick = np.full(steps, np.nan)
    for t in range(steps):
        hartwick[t] = hartwick_residual(traj, t)
        for j in range(n):
            present[t, j] = present_value_residual(traj, t, j)
            hotelling[t, j] = present[t, j] / traj.adjusted_price[t, j]
            user_cost[t, j] = user_cost_rule_residual(traj, t, j)
    consumption, drift = consumption_series(traj)
    report = RuleResidualReport(
        hotelling=hotelling,
        present_value=present,
        user_cost=user_cost,
        hartwick=hartwick,
        consumption=consumption,
        consumption_drift=drift,
        costates=costates(traj),
        labels=list(traj.labels),
    )
    logger.debug("Rule audit over %d steps: %s", steps, report.summary())
    return report
