"""Economy primitives: immutable specs and the trajectory record."""

from sustain_extract.models.demand import (
    DemandSystem,
    demand_jacobian,
    demand_quantity,
    inverse_demand,
)
from sustain_extract.models.economy import EconomySpec, TerminalCondition, discount_factor
from sustain_extract.models.resource import (
    GrowthFunction,
    ResourceSpec,
    growth_derivative,
    growth_eval,
)
from sustain_extract.models.trajectory import EconomyState, Trajectory

__all__ = [
    "DemandSystem",
    "EconomySpec",
    "EconomyState",
    "GrowthFunction",
    "ResourceSpec",
    "TerminalCondition",
    "Trajectory",
    "demand_jacobian",
    "demand_quantity",
    "discount_factor",
    "growth_derivative",
    "growth_eval",
    "inverse_demand",
]
