"""Tests for elasticities, the externality margin and the marginal-revenue identity."""

import numpy as np
import pytest

from sustain_extract.core.enums import MarginMode
from sustain_extract.core.errors import DomainError
from sustain_extract.kernel.externality import (
    demand_elasticities,
    externality_margin,
    marginal_revenue_check,
    total_revenue,
)
from sustain_extract.models import DemandSystem, demand_jacobian

from conftest import isoelastic, linear


# ── Elasticities ──


def test_isoelastic_elasticities_equal_exponents():
    eta = [[-2.0, 0.5], [0.3, -1.0]]
    demand = isoelastic(cross=eta)
    for Q in ([1.0, 1.0], [0.3, 7.0], [12.0, 0.05]):
        report = demand_elasticities(demand, Q)
        assert np.allclose(report.epsilon, eta, atol=1e-10)


def test_linear_own_elasticity():
    report = demand_elasticities(linear([10.0], [[1.0]]), [4.0])
    assert report.price[0] == pytest.approx(6.0)
    assert report.epsilon[0, 0] == pytest.approx(-1.5, rel=1e-12)


def test_single_resource_inverse_is_reciprocal():
    for demand, Q in [(isoelastic(-2.7), [3.0]), (linear([10.0], [[1.0]]), [4.0])]:
        report = demand_elasticities(demand, Q)
        assert report.inverse_elasticity[0, 0] == pytest.approx(1.0 / report.epsilon[0, 0], abs=1e-12)


def test_own_elasticities_negative():
    report = demand_elasticities(linear([30.0, 25.0], [[1.5, -0.4], [0.2, 1.1]]), [2.0, 4.0])
    assert np.all(np.diag(report.epsilon) < 0)
    assert np.all(np.diag(report.inverse_elasticity) < 0)


def test_demand_and_inverse_jacobians_are_inverse():
    demand = isoelastic(cross=[[-2.0, 0.3], [0.2, -1.5]])
    Q = np.array([2.0, 3.0])
    report = demand_elasticities(demand, Q)
    dq_dp = report.epsilon * Q[:, None] / report.price[None, :]
    jac = demand_jacobian(demand, Q)
    assert np.allclose(dq_dp @ jac.T, np.eye(2), atol=1e-8)


def test_elasticities_refuse_corner():
    with pytest.raises(DomainError):
        demand_elasticities(linear([10.0], [[1.0]]), [0.0])


# ── Margin ──


def test_single_resource_isoelastic_margin():
    demand = isoelastic(-2.0, scale=12.0)   # p = 2 at Q = 3
    report = externality_margin(demand, [3.0])
    assert report.market_price[0] == pytest.approx(2.0, rel=1e-14)
    assert report.margin[0] == pytest.approx(-0.5, rel=1e-12)
    assert report.adjusted_price[0] == pytest.approx(1.0, rel=1e-12)


def test_two_resource_linear_margin():
    demand = linear([10.0, 8.0], [[1.0, 0.5], [0.2, 1.0]])
    report = externality_margin(demand, [2.0, 2.0])
    assert np.allclose(report.market_price, [7.0, 5.6])
    assert report.margin[0] == pytest.approx(-2.4 / 7.0, rel=1e-12)
    assert report.adjusted_price[0] == pytest.approx(4.6, rel=1e-12)


def test_adjusted_price_identity_exact():
    demand = linear([10.0, 8.0], [[1.0, 0.5], [0.2, 1.0]])
    report = externality_margin(demand, [2.0, 1.0])
    assert np.array_equal(report.adjusted_price, report.market_price * (1.0 + report.margin))


def test_perfectly_elastic_limit_zero_margin():
    for demand, Q in [
        (isoelastic(cross=[[-2.0, 0.3], [0.2, -1.5]], s=0.0), [2.0, 3.0]),
        (linear([10.0, 8.0], [[1.0, 0.5], [0.2, 1.0]], s=0.0), [2.0, 2.0]),
    ]:
        report = externality_margin(demand, Q)
        assert np.all(report.margin == 0.0)
        assert np.array_equal(report.adjusted_price, report.market_price)


def test_margin_shrinks_monotonically_with_scale():
    sizes = []
    for s in [1.0, 0.5, 0.1, 0.01, 0.0]:
        demand = linear([10.0, 8.0], [[1.0, 0.5], [0.2, 1.0]], s=s)
        sizes.append(np.max(np.abs(externality_margin(demand, [2.0, 2.0]).margin)))
    assert all(b <= a for a, b in zip(sizes, sizes[1:]))
    assert sizes[-1] == 0.0


def test_single_resource_margin_is_reciprocal_elasticity():
    demand = isoelastic(-3.5, scale=2.0)
    eps = demand_elasticities(demand, [1.7]).epsilon[0, 0]
    assert externality_margin(demand, [1.7]).margin[0] == pytest.approx(1.0 / eps, abs=1e-12)


def test_single_resource_adjusted_below_market():
    for demand, Q in [(isoelastic(-2.0), [4.0]), (linear([10.0], [[1.0]]), [3.0])]:
        report = externality_margin(demand, Q)
        assert report.adjusted_price[0] < report.market_price[0]


def test_net_substitution_raises_adjusted_price():
    # strong complementarity in B makes sum_k dp_k/dQ_j Q_k positive
    demand = linear([10.0, 10.0], [[1.0, -3.0], [-3.0, 1.0]])
    report = externality_margin(demand, [1.0, 1.0])
    flagged = report.margin > 0
    assert np.all(flagged)
    assert np.all(report.adjusted_price[flagged] > report.market_price[flagged])


def test_reciprocal_mode_matches_on_single_resource():
    demand = isoelastic(-2.0)
    inverse = externality_margin(demand, [4.0])
    reciprocal = externality_margin(demand, [4.0], mode=MarginMode.RECIPROCAL)
    assert reciprocal.margin[0] == pytest.approx(inverse.margin[0], rel=1e-12)


def test_observed_prices_replace_model_prices():
    demand = isoelastic(-2.0)
    report = externality_margin(demand, [4.0], price=[0.8])
    assert report.market_price[0] == 0.8
    # price impact stays the model's: dp/dQ · Q = -0.25 at Q = 4
    assert report.adjusted_price[0] == pytest.approx(0.55, rel=1e-12)


# ── Marginal revenue ──


def test_marginal_revenue_isoelastic_single():
    assert abs(marginal_revenue_check(isoelastic(-2.0), [4.0], 0)) < 1e-6


def test_marginal_revenue_linear_single():
    assert marginal_revenue_check(linear([10.0], [[1.0]]), [4.0], 0) == pytest.approx(0.0, abs=1e-8)


def test_marginal_revenue_perfectly_elastic():
    demand = linear([10.0, 8.0], [[1.0, 0.5], [0.2, 1.0]], s=0.0)
    for j in range(2):
        assert marginal_revenue_check(demand, [2.0, 2.0], j) == pytest.approx(0.0, abs=1e-8)


def test_marginal_revenue_identity_random_points():
    rng = np.random.default_rng(20240611)
    checked = 0
    while checked < 120:
        n = int(rng.integers(1, 4))
        own = rng.uniform(1.2, 3.0, size=n)
        cross = rng.uniform(-0.25, 0.25, size=(n, n))
        np.fill_diagonal(cross, 0.0)
        if checked % 2 == 0:
            try:
                demand = DemandSystem(
                    kind="isoelastic",
                    scale=rng.uniform(0.5, 2.0, size=n).tolist(),
                    exponents=(np.diag(-own) + cross).tolist(),
                )
            except ValueError:
                continue
        else:
            demand = DemandSystem(
                kind="linear",
                intercepts=[60.0] * n,
                slopes=(np.diag(own) + cross).tolist(),
            )
        Q = rng.uniform(0.5, 5.0, size=n)
        P = externality_margin(demand, Q).adjusted_price
        for j in range(n):
            residual = marginal_revenue_check(demand, Q, j)
            assert abs(residual) / max(1.0, abs(P[j])) <= 1e-6
        checked += 1


def test_total_revenue_linear():
    assert total_revenue(linear([10.0, 8.0], [[1.0, 0.5], [0.2, 1.0]]), [2.0, 2.0]) == pytest.approx(25.2)
