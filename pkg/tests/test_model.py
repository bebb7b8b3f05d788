"""Tests for economy primitives: growth, discounting and demand systems."""

import numpy as np
import pytest
from pydantic import ValidationError

from sustain_extract.core.errors import DemandError, DomainError
from sustain_extract.models import (
    DemandSystem,
    EconomySpec,
    GrowthFunction,
    ResourceSpec,
    TerminalCondition,
    demand_jacobian,
    demand_quantity,
    discount_factor,
    growth_derivative,
    growth_eval,
    inverse_demand,
)

from conftest import economy, isoelastic, linear


# ── Growth ──


def test_logistic_growth_value():
    g = GrowthFunction(kind="logistic", rate=0.1, capacity=1000)
    assert growth_eval(g, 500) == pytest.approx(25.0)
    assert growth_derivative(g, 500) == pytest.approx(0.0)


def test_zero_growth_everywhere():
    g = GrowthFunction(kind="zero")
    assert growth_eval(g, 123.0) == 0.0
    assert growth_derivative(g, 0.0) == 0.0


def test_exponential_growth_at_zero():
    g = GrowthFunction(kind="exponential", rate=0.02)
    assert growth_eval(g, 0.0) == 0.0
    assert growth_derivative(g, 0.0) == pytest.approx(0.02)


def test_growth_rejects_negative_stock():
    g = GrowthFunction(kind="exponential", rate=0.02)
    with pytest.raises(DomainError):
        growth_eval(g, -1.0)


@pytest.mark.parametrize(
    "growth",
    [
        {"kind": "logistic", "rate": 0.3, "capacity": 50.0},
        {"kind": "exponential", "rate": 0.02},
        {"kind": "zero"},
    ],
)
@pytest.mark.parametrize("x", [1.0, 10.0, 25.0, 40.0])
def test_growth_derivative_matches_difference(growth, x):
    g = GrowthFunction(**growth)
    h = 1e-5
    fd = (growth_eval(g, x + h) - growth_eval(g, x - h)) / (2 * h)
    assert growth_derivative(g, x) == pytest.approx(fd, abs=1e-8)


def test_logistic_needs_capacity():
    with pytest.raises(ValidationError):
        GrowthFunction(kind="logistic", rate=0.1)


def test_resource_stock_must_be_positive():
    with pytest.raises(ValidationError):
        ResourceSpec(name="x", stock0=0.0)


# ── Economy ──


def test_discount_factor_constant_rate():
    econ = economy(horizon=10, rate=0.05)
    assert discount_factor(econ, 0) == 1.0
    assert discount_factor(econ, 3) == pytest.approx(1.05 ** -3, rel=1e-14)


def test_discount_factor_zero_rate():
    econ = economy(horizon=10, rate=0.0)
    assert discount_factor(econ, 7) == 1.0


def test_discount_factor_out_of_range():
    econ = economy(horizon=4)
    with pytest.raises(IndexError):
        discount_factor(econ, 5)


def test_rate_schedule_length_checked():
    with pytest.raises(ValidationError):
        EconomySpec(horizon_steps=3, interest_rate=[0.01, 0.02])


def test_rate_must_exceed_minus_one_over_dt():
    with pytest.raises(ValidationError):
        EconomySpec(horizon_steps=3, dt=0.5, interest_rate=-2.0)


def test_horizon_at_least_two():
    with pytest.raises(ValidationError):
        EconomySpec(horizon_steps=1)


def test_rate_schedule_reuses_last_entry():
    econ = EconomySpec(horizon_steps=3, interest_rate=[0.01, 0.02, 0.03])
    assert econ.rate(1) == 0.02
    assert econ.rate(3) == 0.03


def test_terminal_targets_required_for_stock_target():
    with pytest.raises(ValidationError):
        TerminalCondition(kind="stock_target")
    with pytest.raises(ValidationError):
        TerminalCondition(kind="stock_target", target_stocks=[-1.0])
    assert TerminalCondition(kind="exhaust").targets(2) == [0.0, 0.0]


# ── Demand ──


def test_isoelastic_price_at_unit_quantity():
    demand = isoelastic(-2.0, scale=1.0)
    assert inverse_demand(demand, [1.0])[0] == pytest.approx(1.0, rel=1e-15)


def test_isoelastic_price_single_resource():
    demand = isoelastic(-2.0)
    assert inverse_demand(demand, [4.0])[0] == pytest.approx(0.5, rel=1e-14)


def test_linear_price():
    demand = linear([10.0], [[2.0]])
    assert inverse_demand(demand, [3.0])[0] == pytest.approx(4.0)


def test_linear_nonpositive_price_rejected():
    demand = linear([10.0], [[2.0]])
    with pytest.raises(DemandError):
        inverse_demand(demand, [6.0])


def test_isoelastic_requires_positive_quantity():
    with pytest.raises(DomainError):
        inverse_demand(isoelastic(-2.0), [0.0])


def test_increasing_demand_rejected():
    with pytest.raises(ValidationError):
        linear([10.0], [[-1.0]])
    with pytest.raises(ValidationError):
        DemandSystem(kind="isoelastic", scale=[1.0], exponents=[[2.0]])


def test_singular_matrix_rejected():
    with pytest.raises(ValidationError):
        linear([10.0, 10.0], [[1.0, 1.0], [1.0, 1.0]])


def test_family_fields_are_exclusive():
    with pytest.raises(ValidationError):
        DemandSystem(kind="linear", intercepts=[1.0], slopes=[[1.0]], scale=[1.0])


def test_linear_jacobian_orientation():
    demand = linear([20.0, 20.0], [[2.0, 0.5], [0.3, 1.0]])
    jac = demand_jacobian(demand, [1.0, 1.0])
    # J[j, k] = dp_k/dQ_j and p = a - B Q, so J = -B^T
    assert np.allclose(jac, -np.array([[2.0, 0.3], [0.5, 1.0]]))


def test_isoelastic_jacobian_matches_finite_differences():
    demand = isoelastic(cross=[[-2.0, 0.3], [0.2, -1.5]])
    Q = [2.0, 3.0]
    analytic = demand_jacobian(demand, Q)
    fd = demand_jacobian(demand, Q, method="fd")
    assert np.allclose(analytic, fd, rtol=1e-6, atol=1e-10)


def test_linear_jacobian_matches_finite_differences():
    demand = linear([30.0, 25.0], [[1.5, -0.4], [0.2, 1.1]])
    assert np.allclose(
        demand_jacobian(demand, [2.0, 4.0]), demand_jacobian(demand, [2.0, 4.0], method="fd")
    )


def test_demand_quantity_inverts_inverse_demand():
    for demand, Q in [
        (isoelastic(cross=[[-2.0, 0.3], [0.2, -1.5]], scale=2.0), np.array([1.5, 0.7])),
        (linear([30.0, 25.0], [[1.5, -0.4], [0.2, 1.1]]), np.array([2.0, 4.0])),
    ]:
        p = inverse_demand(demand, Q)
        assert np.allclose(demand_quantity(demand, p), Q, rtol=1e-12)


def test_isoelastic_shape_mismatch():
    with pytest.raises(DomainError):
        inverse_demand(isoelastic(-2.0), [1.0, 2.0])
