"""Resource stocks and their natural growth G_j."""

from __future__ import annotations

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from sustain_extract.core.enums import GrowthKind
from sustain_extract.core.errors import DomainError


class GrowthFunction(BaseModel):
    """Natural growth of a stock.

    ``rate`` is g for exponential growth and the intrinsic rate rho for
    logistic growth (1/year); ``capacity`` is the logistic carrying capacity.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: GrowthKind = GrowthKind.ZERO
    rate: float = 0.0
    capacity: Optional[float] = None

    @model_validator(mode="after")
    def _check_parameters(self) -> "GrowthFunction":
        if self.kind == GrowthKind.LOGISTIC:
            if self.capacity is None or self.capacity <= 0:
                raise ValueError("logistic growth needs capacity > 0")
        return self

    def value(self, x: np.ndarray | float) -> np.ndarray | float:
        """G(x) without argument checks; callers clip stocks first."""
        if self.kind == GrowthKind.ZERO:
            return x * 0.0
        if self.kind == GrowthKind.EXPONENTIAL:
            return self.rate * x
        return self.rate * x * (1.0 - x / self.capacity)

    def slope(self, x: np.ndarray | float) -> np.ndarray | float:
        """G'(x) without argument checks."""
        if self.kind == GrowthKind.ZERO:
            return x * 0.0
        if self.kind == GrowthKind.EXPONENTIAL:
            return x * 0.0 + self.rate
        return self.rate * (1.0 - 2.0 * x / self.capacity)


class ResourceSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    stock0: float = Field(gt=0)
    growth: GrowthFunction = Field(default_factory=GrowthFunction)


def _check_stock(x: float) -> float:
    if not np.isfinite(x) or x < 0:
        raise DomainError(f"stock must be a finite value >= 0, got {x}")
    return float(x)


def growth_eval(growth: GrowthFunction, x: float) -> float:
    """Natural growth flow G(x) at stock x."""
    return float(growth.value(_check_stock(x)))


def growth_derivative(growth: GrowthFunction, x: float) -> float:
    """Analytic derivative G'(x)."""
    return float(growth.slope(_check_stock(x)))
