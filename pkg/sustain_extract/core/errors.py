"""Exception hierarchy. Each error carries a stable code and a CLI exit code."""

from __future__ import annotations

from typing import Sequence

from sustain_extract.core.enums import ExitCode


class SustainExtractError(Exception):
    code = "error"
    exit_code = ExitCode.SOLVER_FAILURE

    def as_dict(self) -> dict:
        return {"error": self.code, "message": str(self), "exit_code": int(self.exit_code)}


# ── Configuration and input ──


class ConfigError(SustainExtractError):
    code = "config_error"
    exit_code = ExitCode.CONFIG_ERROR


class InputDataError(ConfigError):
    code = "input_error"


class EnumerationGuardError(ConfigError):
    code = "enumeration_guard"


class MismatchedEconomyError(ConfigError):
    code = "mismatched_economy"


# ── Model evaluation ──


class DomainError(SustainExtractError, ValueError):
    code = "domain_error"


class DemandError(DomainError):
    code = "demand_error"


class RootFindError(DemandError):
    code = "root_find_failure"


class MarginalRevenueError(DemandError):
    code = "marginal_revenue_nonmonotone"


class UnattainablePriceError(DemandError):
    """Adjusted price outside the range the demand system can produce.

    ``direction[j]`` is +1 when P̂_j is too high (extraction would be
    nonpositive), -1 when too low (market price would be nonpositive), 0 when
    resource j is not the cause.
    """

    code = "unattainable_price"

    def __init__(self, message: str, direction: Sequence[int]) -> None:
        super().__init__(message)
        self.direction = tuple(int(d) for d in direction)


# ── Solver ──


class SolverError(SustainExtractError):
    code = "solver_failure"


class InfeasiblePathError(SolverError):
    code = "infeasible_path"

    def __init__(self, message: str, resources: Sequence[int] = ()) -> None:
        super().__init__(message)
        self.resources = tuple(resources)


class BracketNotFoundError(SolverError):
    code = "bracket_failure"


class MaxIterationsError(SolverError):
    code = "max_iterations"


class DivergenceError(SolverError):
    code = "fixed_point_divergence"
