"""Cross-price elasticities, the externalities' price margin and adjusted prices.

The margin is built from inverse elasticities e_jk = (dp_k/dQ_j)·Q_j/p_k, which
makes the adjusted price p_j(1 + m_j) identical to marginal total revenue
d(sum_k p_k Q_k)/dQ_j.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from sustain_extract.core.enums import MarginMode
from sustain_extract.core.errors import DemandError, DomainError
from sustain_extract.models.demand import (
    FD_RELATIVE_STEP,
    DemandSystem,
    as_vector,
    demand_jacobian,
    inverse_demand,
    prices_unchecked,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ElasticityReport:
    epsilon: np.ndarray              # eps_jk = (dq_j/dp_k)·p_k/q_j
    inverse_elasticity: np.ndarray   # e_jk = (dp_k/dQ_j)·Q_j/p_k
    price: np.ndarray
    quantity: np.ndarray


@dataclass(frozen=True)
class MarginReport:
    margin: np.ndarray
    adjusted_price: np.ndarray
    market_price: np.ndarray
    quantity: np.ndarray


def _interior_point(demand: DemandSystem, Q) -> tuple[np.ndarray, np.ndarray]:
    Q = as_vector(demand, Q, "Q")
    if np.any(Q <= 0):
        raise DomainError(f"margins are refused at corner points, Q={Q}")
    return Q, inverse_demand(demand, Q)


def demand_elasticities(demand: DemandSystem, Q) -> ElasticityReport:
    """Demand-side and inverse elasticities at Q."""
    Q, p = _interior_point(demand, Q)
    jac = demand_jacobian(demand, Q)
    try:
        # jac.T[k, j] = dp_k/dQ_j, so its inverse is dq/dp in (j, k) orientation
        dq_dp = np.linalg.inv(jac.T)
    except np.linalg.LinAlgError as exc:
        raise DemandError(f"singular inverse-demand Jacobian at Q={Q}") from exc
    epsilon = dq_dp * (p[None, :] / Q[:, None])
    inverse = jac * (Q[:, None] / p[None, :])
    return ElasticityReport(epsilon=epsilon, inverse_elasticity=inverse, price=p, quantity=Q)


def margin_from_jacobian(
    jac: np.ndarray,
    price: np.ndarray,
    quantity: np.ndarray,
    scale: float = 1.0,
) -> np.ndarray:
    """m_j = (s/p_j)·sum_k J[j, k]·Q_k, including the own term k = j."""
    return scale * (jac @ quantity) / price


def _reciprocal_margin(demand: DemandSystem, Q: np.ndarray, price: np.ndarray) -> np.ndarray:
    eps = demand_elasticities(demand, Q).epsilon
    revenue = price * Q
    inv = np.zeros_like(eps)
    nonzero = eps != 0
    inv[nonzero] = 1.0 / eps[nonzero]
    return demand.price_impact_scale * (inv @ revenue) / revenue


def externality_margin(
    demand: DemandSystem,
    Q,
    mode: MarginMode = MarginMode.INVERSE,
    price: Optional[np.ndarray] = None,
) -> MarginReport:
    """Margin m and adjusted price P̂ = p(1 + m) at extraction Q.

    ``price`` substitutes observed market prices for p(Q) (audits); the
    price-impact Jacobian always comes from the demand model.
    """
    Q, model_price = _interior_point(demand, Q)
    p = model_price if price is None else as_vector(demand, price, "price")
    if np.any(p <= 0):
        raise DomainError(f"margins need positive prices, got {p}")
    if mode == MarginMode.RECIPROCAL:
        margin = _reciprocal_margin(demand, Q, p)
    else:
        margin = margin_from_jacobian(demand_jacobian(demand, Q), p, Q, demand.price_impact_scale)
    return MarginReport(margin=margin, adjusted_price=p * (1.0 + margin), market_price=p, quantity=Q)


def adjusted_prices(demand: DemandSystem, Q) -> np.ndarray:
    return externality_margin(demand, Q).adjusted_price


def total_revenue(demand: DemandSystem, Q) -> float:
    Q = as_vector(demand, Q, "Q")
    return float(inverse_demand(demand, Q) @ Q)


def marginal_revenue_check(demand: DemandSystem, Q, j: int) -> float:
    """P̂_j minus a central difference of total revenue in Q_j.

    Prices move along Q + s·dQ with s the demand's price-impact scale, so the
    identity P̂_j = dR/dQ_j holds for every s.
    """
    Q, _ = _interior_point(demand, Q)
    target = externality_margin(demand, Q).adjusted_price[j]
    s = demand.price_impact_scale
    h = min(max(FD_RELATIVE_STEP, FD_RELATIVE_STEP * Q[j]), 0.5 * Q[j])

    def revenue(step: float) -> float:
        quantity, moved = Q.copy(), Q.copy()
        quantity[j] += step
        moved[j] += s * step
        return float(prices_unchecked(demand, moved) @ quantity)

    slope = (revenue(h) - revenue(-h)) / (2.0 * h)
    return float(target - slope)
