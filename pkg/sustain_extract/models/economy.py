"""Time grid, interest schedule, initial capital and terminal conditions."""

from __future__ import annotations

from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from sustain_extract.core.enums import TerminalKind


class TerminalCondition(BaseModel):
    """Finite-horizon stand-in for the transversality condition on reserves."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: TerminalKind = TerminalKind.EXHAUST
    target_stocks: Optional[List[float]] = None
    tolerance: float = Field(default=1e-8, gt=0)

    @model_validator(mode="after")
    def _check_targets(self) -> "TerminalCondition":
        if self.kind == TerminalKind.STOCK_TARGET:
            if not self.target_stocks:
                raise ValueError("stock_target terminal condition needs target_stocks")
            if any(x < 0 for x in self.target_stocks):
                raise ValueError("target_stocks must be >= 0")
        elif self.target_stocks is not None:
            raise ValueError("target_stocks is only allowed with kind 'stock_target'")
        return self

    def targets(self, n: int) -> List[float]:
        if self.kind == TerminalKind.EXHAUST:
            return [0.0] * n
        return list(self.target_stocks or [])


class EconomySpec(BaseModel):
    """Discrete-time economy: horizon, step length, r_t and K_0."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    horizon_steps: int = Field(ge=2)
    dt: float = Field(default=1.0, gt=0)
    interest_rate: Union[float, List[float]] = 0.0
    capital0: float = Field(default=0.0, ge=0)
    terminal: TerminalCondition = Field(default_factory=TerminalCondition)

    @model_validator(mode="after")
    def _check_rates(self) -> "EconomySpec":
        rates = self.interest_rate if isinstance(self.interest_rate, list) else [self.interest_rate]
        if isinstance(self.interest_rate, list) and len(rates) != self.horizon_steps:
            raise ValueError(
                f"interest_rate sequence has {len(rates)} entries, "
                f"expected horizon_steps={self.horizon_steps}"
            )
        floor = -1.0 / self.dt
        if any(r <= floor for r in rates):
            raise ValueError(f"every interest rate must exceed -1/dt = {floor}")
        return self

    def rate(self, t: int) -> float:
        """Interest rate of step t; steps past the schedule reuse the last entry."""
        if isinstance(self.interest_rate, list):
            if t < 0:
                raise IndexError(f"step index {t} out of range")
            return float(self.interest_rate[min(t, len(self.interest_rate) - 1)])
        return float(self.interest_rate)

    def growth_factor(self, t: int) -> float:
        """One-step capital compounding 1 + r_t·dt."""
        return 1.0 + self.rate(t) * self.dt


def discount_factor(econ: EconomySpec, t: int) -> float:
    """beta(t) = prod_{s<t} 1/(1 + r_s·dt), with beta(0) = 1."""
    if t < 0 or t > econ.horizon_steps:
        raise IndexError(f"step {t} outside [0, {econ.horizon_steps}]")
    beta = 1.0
    for s in range(t):
        beta /= econ.growth_factor(s)
    return beta
