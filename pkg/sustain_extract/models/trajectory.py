"""Time-indexed record of an extraction path."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from sustain_extract.models.demand import DemandSystem
from sustain_extract.models.economy import EconomySpec
from sustain_extract.models.resource import ResourceSpec


@dataclass(frozen=True)
class EconomyState:
    """Snapshot of the aggregate economy at one step."""

    t: int
    stocks: np.ndarray
    capital: float
    extraction: np.ndarray
    prices: np.ndarray
    income: float


@dataclass
class Trajectory:
    """Per-step arrays; rows t = 0..T, resource columns j = 0..n-1.

    Flow entries of the last row describe the market state the terminal
    adjusted price implies and may be NaN when no such state exists.
    """

    economy: EconomySpec
    resources: List[ResourceSpec]
    demand: DemandSystem
    price: np.ndarray
    adjusted_price: np.ndarray
    margin: np.ndarray
    extraction: np.ndarray
    stock: np.ndarray
    growth: np.ndarray
    capital: np.ndarray
    income: np.ndarray
    investment: np.ndarray
    consumption: np.ndarray
    consumption_level: float = float("nan")
    labels: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.labels:
            self.labels = [r.name for r in self.resources]

    @property
    def steps(self) -> int:
        """Number of transitions T (rows minus one)."""
        return self.stock.shape[0] - 1

    @property
    def n(self) -> int:
        return self.stock.shape[1]

    def rate(self, t: int) -> float:
        return self.economy.rate(t)

    def growth_slope(self, t: int, j: int) -> float:
        """G'_j evaluated at the start-of-period stock, clipped at zero."""
        x = max(float(self.stock[t, j]), 0.0)
        return float(self.resources[j].growth.slope(x))

    def growth_slopes(self, t: int) -> np.ndarray:
        return np.array([self.growth_slope(t, j) for j in range(self.n)])

    def state_at(self, t: int) -> EconomyState:
        return EconomyState(
            t=t,
            stocks=self.stock[t].copy(),
            capital=float(self.capital[t]),
            extraction=self.extraction[t].copy(),
            prices=self.price[t].copy(),
            income=float(self.income[t]),
        )


def accumulate_capital(
    economy: EconomySpec,
    revenue: Sequence[float],
    consumption_level: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """K, Y and I under constant consumption C̄.

    Y_t = r_t·K_t + revenue_t, I_t = Y_t - C̄, K_{t+1} = K_t + I_t·dt.
    ``revenue`` has one entry per row (T+1); the last entry may be NaN.
    """
    revenue = np.asarray(revenue, dtype=float)
    rows = revenue.shape[0]
    capital = np.empty(rows)
    income = np.empty(rows)
    investment = np.empty(rows)
    capital[0] = economy.capital0
    for t in range(rows):
        income[t] = economy.rate(t) * capital[t] + revenue[t]
        investment[t] = income[t] - consumption_level
        if t + 1 < rows:
            capital[t + 1] = capital[t] + investment[t] * economy.dt
    return capital, income, investment


def step_stocks(
    resources: Sequence[ResourceSpec],
    stock: np.ndarray,
    extraction: np.ndarray,
    dt: float,
) -> tuple[np.ndarray, np.ndarray]:
    """One stock update X + (G(X) - Q)·dt; returns (next stock, growth flow)."""
    clipped = np.maximum(stock, 0.0)
    growth = np.array([r.growth.value(x) for r, x in zip(resources, clipped)], dtype=float)
    return stock + (growth - extraction) * dt, growth


def empty_rows(rows: int, n: Optional[int] = None) -> np.ndarray:
    shape = (rows,) if n is None else (rows, n)
    return np.full(shape, np.nan)
