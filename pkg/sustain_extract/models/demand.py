"""Parametric inverse-demand systems p(Q) with analytic Jacobians.

Jacobian orientation is fixed throughout the package: ``J[j, k] = dp_k/dQ_j``,
rows indexed by the differentiation variable Q_j.
"""

from __future__ import annotations

import logging
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from sustain_extract.core.enums import DemandKind
from sustain_extract.core.errors import DemandError, DomainError, RootFindError

logger = logging.getLogger(__name__)

INVERSION_TOLERANCE = 1e-12
FD_RELATIVE_STEP = 1e-6


class DemandSystem(BaseModel):
    """Isoelastic (q_j = A_j prod_k p_k^eta_jk) or linear (p = a - B·Q) demand.

    ``price_impact_scale`` weights the price-impact term of the externality
    margin; 0 is the perfectly elastic limit, 1 the full demand response.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: DemandKind
    scale: Optional[List[float]] = None
    exponents: Optional[List[List[float]]] = None
    intercepts: Optional[List[float]] = None
    slopes: Optional[List[List[float]]] = None
    price_impact_scale: float = Field(default=1.0, ge=0)

    @model_validator(mode="after")
    def _check_family(self) -> "DemandSystem":
        if self.kind == DemandKind.ISOELASTIC:
            if self.scale is None or self.exponents is None:
                raise ValueError("isoelastic demand needs 'scale' and 'exponents'")
            if self.intercepts is not None or self.slopes is not None:
                raise ValueError("isoelastic demand takes no 'intercepts'/'slopes'")
            vec, mat = np.asarray(self.scale, float), np.asarray(self.exponents, float)
            if np.any(vec <= 0):
                raise ValueError("isoelastic scale A_j must be > 0")
        else:
            if self.intercepts is None or self.slopes is None:
                raise ValueError("linear demand needs 'intercepts' and 'slopes'")
            if self.scale is not None or self.exponents is not None:
                raise ValueError("linear demand takes no 'scale'/'exponents'")
            vec, mat = np.asarray(self.intercepts, float), np.asarray(self.slopes, float)
            if np.any(vec <= 0):
                raise ValueError("linear intercepts a_j must be > 0")

        n = vec.shape[0]
        if mat.shape != (n, n):
            raise ValueError(f"matrix must be {n}x{n}, got {mat.shape}")
        if not np.all(np.isfinite(mat)) or not np.all(np.isfinite(vec)):
            raise ValueError("demand parameters must be finite")
        if abs(np.linalg.det(mat)) < 1e-14:
            raise ValueError("demand matrix is singular")

        # own-price monotonicity: dp_j/dQ_j < 0
        if self.kind == DemandKind.ISOELASTIC:
            own = np.diag(np.linalg.inv(mat))
        else:
            own = -np.diag(mat)
        if np.any(own >= 0):
            raise ValueError("inverse demand must be strictly decreasing in own extraction")
        return self

    @property
    def n(self) -> int:
        return len(self.scale if self.kind == DemandKind.ISOELASTIC else self.intercepts)

    @property
    def A(self) -> np.ndarray:
        return np.asarray(self.scale, dtype=float)

    @property
    def eta(self) -> np.ndarray:
        return np.asarray(self.exponents, dtype=float)

    @property
    def a(self) -> np.ndarray:
        return np.asarray(self.intercepts, dtype=float)

    @property
    def B(self) -> np.ndarray:
        return np.asarray(self.slopes, dtype=float)

    @property
    def is_diagonal(self) -> bool:
        mat = self.eta if self.kind == DemandKind.ISOELASTIC else self.B
        return bool(np.all(mat == np.diag(np.diag(mat))))


def as_vector(demand: DemandSystem, values, name: str) -> np.ndarray:
    vec = np.atleast_1d(np.asarray(values, dtype=float))
    if vec.shape != (demand.n,):
        raise DomainError(f"{name} must have shape ({demand.n},), got {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise DomainError(f"{name} must be finite, got {vec}")
    return vec


def prices_unchecked(demand: DemandSystem, Q: np.ndarray) -> np.ndarray:
    """p(Q) without admissibility checks."""
    if demand.kind == DemandKind.LINEAR:
        return demand.a - demand.B @ Q
    log_p = np.linalg.solve(demand.eta, np.log(Q) - np.log(demand.A))
    return np.exp(log_p)


def inverse_demand(demand: DemandSystem, Q) -> np.ndarray:
    """Market prices p(Q).

    Isoelastic demand is linear in logs, log q = log A + eta·log p, so the
    inversion is a single linear solve; the demand residual is then checked
    against INVERSION_TOLERANCE in log units.
    """
    Q = as_vector(demand, Q, "Q")
    if demand.kind == DemandKind.LINEAR:
        if np.any(Q < 0):
            raise DomainError(f"extraction must be >= 0, got {Q}")
        p = demand.a - demand.B @ Q
    else:
        if np.any(Q <= 0):
            raise DomainError(f"isoelastic demand needs Q > 0, got {Q}")
        log_q = np.log(Q)
        log_p = np.linalg.solve(demand.eta, log_q - np.log(demand.A))
        residual = np.max(np.abs(demand.eta @ log_p + np.log(demand.A) - log_q))
        if residual > INVERSION_TOLERANCE * max(1.0, float(np.max(np.abs(log_q)))):
            raise RootFindError(f"isoelastic inversion residual {residual:.3e} above tolerance")
        p = np.exp(log_p)
    if np.any(~np.isfinite(p)) or np.any(p <= 0):
        raise DemandError(f"nonpositive market price {p} at Q={Q}")
    return p


def demand_quantity(demand: DemandSystem, p) -> np.ndarray:
    """Forward demand map q(p)."""
    p = as_vector(demand, p, "p")
    if np.any(p <= 0):
        raise DomainError(f"prices must be > 0, got {p}")
    if demand.kind == DemandKind.ISOELASTIC:
        return demand.A * np.exp(demand.eta @ np.log(p))
    return np.linalg.solve(demand.B, demand.a - p)


def _analytic_jacobian(demand: DemandSystem, Q: np.ndarray, p: np.ndarray) -> np.ndarray:
    if demand.kind == DemandKind.LINEAR:
        return -demand.B.T.copy()
    # dq_j/dp_k = eta_jk q_j / p_k
    dq_dp = demand.eta * (Q[:, None] / p[None, :])
    try:
        dp_dq = np.linalg.inv(dq_dp)
    except np.linalg.LinAlgError as exc:
        raise DemandError(f"singular demand Jacobian at Q={Q}") from exc
    return dp_dq.T


def _fd_jacobian(demand: DemandSystem, Q: np.ndarray) -> np.ndarray:
    jac = np.empty((demand.n, demand.n))
    for j in range(demand.n):
        h = max(FD_RELATIVE_STEP, FD_RELATIVE_STEP * Q[j])
        if demand.kind == DemandKind.ISOELASTIC:
            h = min(h, 0.5 * Q[j])
        up, down = Q.copy(), Q.copy()
        up[j] += h
        down[j] -= h
        jac[j, :] = (prices_unchecked(demand, up) - prices_unchecked(demand, down)) / (2.0 * h)
    return jac


def demand_jacobian(
    demand: DemandSystem,
    Q,
    method: Literal["analytic", "fd"] = "analytic",
) -> np.ndarray:
    """Price-impact matrix J[j, k] = dp_k/dQ_j (rows = differentiation variable).

    ``method="fd"`` uses central differences with step max(1e-6, 1e-6·Q_j).
    """
    Q = as_vector(demand, Q, "Q")
    p = inverse_demand(demand, Q)
    if method == "fd":
        jac = _fd_jacobian(demand, Q)
    else:
        jac = _analytic_jacobian(demand, Q, p)
    if np.any(np.diag(jac) >= 0):
        raise DemandError(f"own-price monotonicity violated at Q={Q}: diag={np.diag(jac)}")
    return jac
