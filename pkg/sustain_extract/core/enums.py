"""Enumerations for model families, terminal conditions and CLI exit codes."""

from enum import Enum, IntEnum


class GrowthKind(str, Enum):
    ZERO = "zero"
    EXPONENTIAL = "exponential"
    LOGISTIC = "logistic"


class DemandKind(str, Enum):
    ISOELASTIC = "isoelastic"
    LINEAR = "linear"


class TerminalKind(str, Enum):
    EXHAUST = "exhaust"
    STOCK_TARGET = "stock_target"


class MarginMode(str, Enum):
    INVERSE = "inverse"          # e_jk from the inverse-demand Jacobian
    RECIPROCAL = "reciprocal"    # elementwise 1/eps_jk, audit comparison only


class ExitCode(IntEnum):
    OK = 0
    CONFIG_ERROR = 1
    SOLVER_FAILURE = 2
    ORACLE_GAP = 3
