"""Tests for rule residuals and costate reconstruction on hand-built trajectories."""

import numpy as np
import pytest

from sustain_extract.core.errors import DomainError
from sustain_extract.kernel.rules import (
    audit_trajectory,
    consumption_drift,
    consumption_series,
    costates,
    hartwick_investment,
    hartwick_residual,
    hotelling_residual,
    present_value_residual,
    user_cost_rule_residual,
)
from sustain_extract.models import EconomySpec, GrowthFunction, ResourceSpec, Trajectory

from conftest import isoelastic


def make_trajectory(adjusted, extraction=None, stock=None, rate=0.0, growth_rate=0.0,
                    income=None, investment=None):
    """Trajectory from row-major lists; growth is exponential with ``growth_rate``."""
    adjusted = np.asarray(adjusted, dtype=float)
    rows, n = adjusted.shape
    extraction = np.full((rows, n), 1.0) if extraction is None else np.asarray(extraction, float).reshape(rows, n)
    stock = np.full((rows, n), 100.0) if stock is None else np.asarray(stock, float).reshape(rows, n)
    kind = "exponential" if growth_rate else "zero"
    resources = [
        ResourceSpec(name=f"r{j}", stock0=float(stock[0, j]), growth=GrowthFunction(kind=kind, rate=growth_rate))
        for j in range(n)
    ]
    growth = growth_rate * np.maximum(stock, 0.0)
    income = np.zeros(rows) if income is None else np.asarray(income, float)
    investment = np.zeros(rows) if investment is None else np.asarray(investment, float)
    return Trajectory(
        economy=EconomySpec(horizon_steps=max(rows - 1, 2), interest_rate=rate),
        resources=resources,
        demand=isoelastic(*([-2.0] * n)),
        price=adjusted * 2.0,
        adjusted_price=adjusted,
        margin=np.full((rows, n), -0.5),
        extraction=extraction,
        stock=stock,
        growth=growth,
        capital=np.zeros(rows),
        income=income,
        investment=investment,
        consumption=income - investment,
    )


# ── Hotelling / present value ──


def test_hotelling_exact_growth_is_zero():
    traj = make_trajectory([[1.0], [1.05]], rate=0.05)
    assert hotelling_residual(traj, 0, 0) == pytest.approx(0.0, abs=1e-15)


def test_hotelling_flat_price_with_interest():
    traj = make_trajectory([[1.0], [1.0]], rate=0.05)
    assert hotelling_residual(traj, 0, 0) == pytest.approx(1 / 1.05 - 1, rel=1e-12)
    assert hotelling_residual(traj, 0, 0) == pytest.approx(-0.047619, abs=1e-6)


def test_hotelling_with_growth_factor():
    # P̂ grows at (1 + r)/(1 + G') with G' = 0.02
    traj = make_trajectory([[1.0], [1.05 / 1.02]], rate=0.05, growth_rate=0.02)
    assert hotelling_residual(traj, 0, 0) == pytest.approx(0.0, abs=1e-15)


def test_present_value_is_absolute_form():
    traj = make_trajectory([[2.0], [2.0]], rate=0.05)
    assert present_value_residual(traj, 0, 0) == pytest.approx(2.0 / 1.05 - 2.0, rel=1e-12)
    assert present_value_residual(traj, 0, 0) == pytest.approx(2.0 * hotelling_residual(traj, 0, 0))


def test_hotelling_rejects_nonpositive_price():
    traj = make_trajectory([[0.0], [1.0]])
    with pytest.raises(DomainError):
        hotelling_residual(traj, 0, 0)


def test_hotelling_step_out_of_range():
    traj = make_trajectory([[1.0], [1.0]])
    with pytest.raises(IndexError):
        hotelling_residual(traj, 1, 0)


def test_classical_reduction_market_price_ratio():
    # zero margin and zero growth: residual is p(t+1)/p(t)/(1 + r) - 1
    traj = make_trajectory([[3.0], [3.15]], rate=0.05)
    traj.margin[:] = 0.0
    traj.price[:] = traj.adjusted_price
    assert hotelling_residual(traj, 0, 0) == pytest.approx(traj.price[1, 0] / traj.price[0, 0] / 1.05 - 1)


# ── User cost ──


def test_user_cost_symmetric_split():
    traj = make_trajectory([[1.0], [1.0]], extraction=[[50.0], [0.0]], stock=[[100.0], [50.0]])
    assert user_cost_rule_residual(traj, 0, 0) == pytest.approx(0.0)


def test_user_cost_price_falling():
    traj = make_trajectory([[2.0], [1.0]], extraction=[[10.0], [0.0]], stock=[[30.0], [20.0]])
    assert user_cost_rule_residual(traj, 0, 0) == pytest.approx(0.0)


def test_user_cost_with_interest():
    traj = make_trajectory([[1.0], [1.0]], extraction=[[50.0], [0.0]], stock=[[100.0], [50.0]], rate=0.1)
    assert user_cost_rule_residual(traj, 0, 0) == pytest.approx(5.0)


def test_half_split_when_both_rules_hold():
    # present value exact and G' = 0: the user-cost rule pins Q = X/2
    for X in [3.0, 17.5, 1e4]:
        traj = make_trajectory([[1.0], [1.07]], extraction=[[X / 2], [0.0]], stock=[[X], [X / 2]], rate=0.07)
        assert present_value_residual(traj, 0, 0) == pytest.approx(0.0, abs=1e-14)
        assert user_cost_rule_residual(traj, 0, 0) == pytest.approx(0.0, abs=1e-10 * X)


# ── Hartwick ──


def test_hartwick_nonrenewable():
    traj = make_trajectory([[2.0], [2.0]], extraction=[[5.0], [5.0]])
    assert hartwick_investment(traj, 0) == pytest.approx(10.0)


def test_hartwick_renewable_steady_state():
    traj = make_trajectory([[2.0], [2.0]], extraction=[[5.0], [5.0]], stock=[[100.0], [100.0]], growth_rate=0.05)
    assert hartwick_investment(traj, 0) == pytest.approx(0.0)


def test_hartwick_two_resources():
    traj = make_trajectory([[4.6, 5.0], [4.6, 5.0]], extraction=[[2.0, 4.0], [2.0, 4.0]])
    traj.growth[0] = [0.0, 5.0]
    assert hartwick_investment(traj, 0) == pytest.approx(4.2)


def test_hartwick_residual_against_investment():
    traj = make_trajectory([[2.0], [2.0]], extraction=[[5.0], [5.0]], investment=[12.0, 10.0])
    assert hartwick_residual(traj, 0) == pytest.approx(2.0)


def test_hartwick_classical_reduction():
    traj = make_trajectory([[3.0], [3.0]], extraction=[[4.0], [4.0]])
    traj.margin[:] = 0.0
    traj.price[:] = traj.adjusted_price
    assert hartwick_investment(traj, 0) == pytest.approx(float(traj.price[0] @ traj.extraction[0]))


# ── Consumption ──


def test_consumption_constant():
    traj = make_trajectory([[1.0], [1.0]], income=[10.0, 10.5], investment=[2.0, 2.5])
    consumption, drift = consumption_series(traj)
    assert np.allclose(consumption, [8.0, 8.0])
    assert drift == 0.0


def test_consumption_drift():
    traj = make_trajectory([[1.0], [1.0]], income=[10.0, 10.5], investment=[2.0, 2.0])
    _, drift = consumption_series(traj)
    assert drift == pytest.approx(0.0625)


def test_consumption_drift_small_level_uses_unit_floor():
    assert consumption_drift(np.array([0.5, 0.75])) == pytest.approx(0.25)


# ── Costates ──


def test_costates_constant_without_interest():
    traj = make_trajectory([[1.0], [1.0], [1.0]])
    series = costates(traj)
    assert np.allclose(series.psi[:, 0], 1.0)
    assert np.all(series.pi > 0)


def test_costates_hotelling_path_constant_psi():
    traj = make_trajectory([[1.0], [1.05], [1.05 ** 2]], rate=0.05)
    series = costates(traj)
    assert np.allclose(series.psi[:, 0], 1.0, rtol=1e-14)


def test_costates_with_growth_decay():
    prices = [[1.0], [1.05 / 1.02], [(1.05 / 1.02) ** 2]]
    traj = make_trajectory(prices, stock=[[100.0], [100.0], [100.0]], rate=0.05, growth_rate=0.02)
    series = costates(traj)
    assert series.psi[1, 0] / series.psi[0, 0] == pytest.approx(1 / 1.02, rel=1e-12)
    assert np.allclose(series.psi / series.pi[:, None], traj.adjusted_price)


def test_psi_residual_matches_hotelling():
    traj = make_trajectory([[1.0], [1.1], [1.13]], rate=0.05, growth_rate=0.01)
    series = costates(traj)
    for t in range(2):
        expected = series.pi[t] * traj.adjusted_price[t, 0] * hotelling_residual(traj, t, 0)
        assert series.psi_residual[t, 0] == pytest.approx(expected, abs=1e-12)


# ── Report ──


def test_audit_report_shapes_and_summary():
    traj = make_trajectory([[1.0, 2.0], [1.05, 2.1], [1.1025, 2.205]], rate=0.05)
    report = audit_trajectory(traj)
    assert report.hotelling.shape == (2, 2)
    assert report.hartwick.shape == (2,)
    assert report.labels == ["r0", "r1"]
    summary = report.summary()
    assert summary["max_abs_hotelling"] == pytest.approx(0.0, abs=1e-14)
    assert set(summary) == {
        "max_abs_hotelling", "max_abs_present_value", "max_abs_user_cost",
        "max_abs_hartwick", "max_abs_costate", "consumption_drift",
    }


def test_state_snapshot_copies_row():
    traj = make_trajectory([[1.0], [1.05]], extraction=[[5.0], [4.0]], stock=[[100.0], [95.0]],
                           income=[3.0, 4.0])
    state = traj.state_at(1)
    assert state.t == 1
    assert state.stocks.tolist() == [95.0]
    assert state.income == 4.0
    state.stocks[0] = -1.0
    assert traj.stock[1, 0] == 95.0
