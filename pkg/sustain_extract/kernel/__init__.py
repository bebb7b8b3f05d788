"""Kernel package: the numerical core.

- externality: elasticities, the externalities' price margin, adjusted prices
- rules: Hotelling, user-cost and Hartwick residuals plus costate diagnostics
- solver: Hotelling stepping and shooting on the initial adjusted price
- oracle: brute-force max-min enumeration used to validate the solver
"""

from sustain_extract.kernel.externality import (
    ElasticityReport,
    MarginReport,
    adjusted_prices,
    demand_elasticities,
    externality_margin,
    marginal_revenue_check,
)
from sustain_extract.kernel.oracle import (
    GapReport,
    OracleConfig,
    OracleResult,
    compare,
    enumerate_maxmin,
    feasible_cbar,
)
from sustain_extract.kernel.rules import RuleResidualReport, audit_trajectory
from sustain_extract.kernel.solver import (
    SolveResult,
    SolverConfig,
    propagate,
    recover_market_state,
    solve_constant_consumption,
    solve_user_cost_mode,
    step_user_cost,
)

__all__ = [
    "ElasticityReport",
    "MarginReport",
    "adjusted_prices",
    "demand_elasticities",
    "externality_margin",
    "marginal_revenue_check",
    "GapReport",
    "OracleConfig",
    "OracleResult",
    "compare",
    "enumerate_maxmin",
    "feasible_cbar",
    "RuleResidualReport",
    "audit_trajectory",
    "SolveResult",
    "SolverConfig",
    "propagate",
    "recover_market_state",
    "solve_constant_consumption",
    "solve_user_cost_mode",
    "step_user_cost",
]
