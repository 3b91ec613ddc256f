"""Integrator tests against analytic oracles: the scalar exponential, an
undamped rotation, and trapezoid exactness."""

import math

import numpy as np
import pytest

from lepra_octl import (
    CostWeights,
    IntegrationError,
    TimeMesh,
    Trajectory,
    cost_integral,
    integrate_backward,
    integrate_forward,
)


def rk4_growth_factor(h: float) -> float:
    """Exact per-step amplification of classical RK4 on x' = x."""
    return 1.0 + h + h**2 / 2.0 + h**3 / 6.0 + h**4 / 24.0


def test_mesh_validation():
    with pytest.raises(ValueError):
        TimeMesh(1.0, 1.0, 10)
    with pytest.raises(ValueError):
        TimeMesh(0.0, 1.0, 0)
    mesh = TimeMesh(0.0, 1.0, 10)
    assert mesh.h == pytest.approx(0.1)
    np.testing.assert_allclose(mesh.nodes()[-1], 1.0)


def test_trajectory_validation():
    mesh = TimeMesh(0.0, 1.0, 4)
    with pytest.raises(ValueError, match="nodes"):
        Trajectory(mesh, np.zeros((3, 2)))
    with pytest.raises(ValueError, match="finite"):
        Trajectory(mesh, np.full((5, 2), np.nan))


def test_forward_scalar_exponential():
    mesh = TimeMesh(0.0, 1.0, 10)
    traj = integrate_forward(lambda t, x, u, p: x, 1.0, None, mesh)
    x1 = traj.values[-1, 0]
    # the integrator must land exactly on the discrete RK4 solution ...
    assert x1 == pytest.approx(rk4_growth_factor(0.1) ** 10, rel=1e-13)
    # ... which sits within ~2.1e-6 of the analytic value e at this step
    assert abs(x1 - math.e) < 2.5e-6
    assert traj.values[0, 0] == 1.0


def test_forward_zero_dynamics_is_constant():
    mesh = TimeMesh(0.0, 3.0, 7)
    x0 = np.array([2.0, -1.0])
    traj = integrate_forward(lambda t, x, u, p: np.zeros_like(x), x0, None, mesh)
    assert np.all(traj.values == x0)


def test_forward_halving_h_divides_error_by_about_16():
    errs = []
    for n in (10, 20):
        traj = integrate_forward(lambda t, x, u, p: x, 1.0, None, TimeMesh(0.0, 1.0, n))
        errs.append(abs(traj.values[-1, 0] - math.e))
    assert errs[0] / errs[1] == pytest.approx(16.0, rel=0.08)


def test_forward_observed_order_at_least_3_9():
    hs = np.array([0.2, 0.1, 0.05, 0.025])
    errs = []
    for h in hs:
        n = round(1.0 / h)
        traj = integrate_forward(lambda t, x, u, p: x, 1.0, None, TimeMesh(0.0, 1.0, n))
        errs.append(abs(traj.values[-1, 0] - math.e))
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope >= 3.9


def test_forward_mesh_mismatch_rejected():
    mesh = TimeMesh(0.0, 1.0, 10)
    controls = Trajectory(TimeMesh(0.0, 1.0, 5), np.zeros((6, 1)))
    with pytest.raises(ValueError, match="mesh"):
        integrate_forward(lambda t, x, u, p: x, 1.0, controls, mesh)


def test_forward_uses_adjacent_node_average_at_half_steps():
    mesh = TimeMesh(0.0, 1.0, 1)
    controls = Trajectory(mesh, np.array([[0.0], [1.0]]))
    seen = []

    def rhs(t, x, u, p):
        seen.append(float(u[0]))
        return np.zeros_like(x)

    integrate_forward(rhs, 0.0, controls, mesh)
    assert seen == [0.0, 0.5, 0.5, 1.0]


def test_forward_reports_failing_node():
    def rhs(t, x, u, p):
        return np.full_like(x, np.inf) if t >= 0.55 else x

    with pytest.raises(IntegrationError) as exc:
        integrate_forward(rhs, 1.0, None, TimeMesh(0.0, 1.0, 10))
    assert exc.value.node == 6


def test_backward_scalar_exponential():
    mesh = TimeMesh(0.0, 1.0, 10)
    traj = integrate_backward(lambda t, lam, x, u, p: lam, 1.0, None, None, mesh)
    assert abs(traj.values[0, 0] - math.exp(-1.0)) < 1e-6
    assert traj.values[-1, 0] == 1.0  # terminal condition, bit-exact


def test_backward_zero_everything():
    mesh = TimeMesh(0.0, 2.0, 8)
    traj = integrate_backward(lambda t, lam, x, u, p: np.zeros_like(lam), 0.0, None, None, mesh)
    assert np.all(traj.values == 0.0)


def test_forward_backward_round_trip_is_order_four():
    # undamped rotation: integrate forward, then run the same field backward
    def rhs_f(t, x, u, p):
        return np.array([x[1], -x[0]])

    def rhs_b(t, lam, x, u, p):
        return np.array([lam[1], -lam[0]])

    x0 = np.array([1.0, 0.5])
    errs = []
    for n in (20, 40):
        mesh = TimeMesh(0.0, 2.0, n)
        fwd = integrate_forward(rhs_f, x0, None, mesh)
        back = integrate_backward(rhs_b, fwd.values[-1], None, None, mesh)
        errs.append(np.max(np.abs(back.values[0] - x0)))
    # halving h must shrink the defect at least 2^4; partial cancellation
    # between the passes makes it even faster here
    assert errs[0] / errs[1] >= 14.0
    assert errs[1] < 1e-6


def test_cost_integral_examples():
    w = CostWeights(P=1.0, Q=1.0, R=1.0)
    mesh = TimeMesh(0.0, 100.0, 50)
    states = np.zeros((51, 9))
    states[:, 1] = 1.0
    states[:, 2] = 1.0
    controls = Trajectory(mesh, np.zeros((51, 8)))
    assert cost_integral(Trajectory(mesh, states), controls, w) == pytest.approx(200.0)

    zeros = np.zeros((51, 9))
    assert cost_integral(Trajectory(mesh, zeros), controls, w) == 0.0

    # trapezoid is exact for integrands linear on the mesh
    mesh1 = TimeMesh(0.0, 1.0, 17)
    lin = np.zeros((18, 9))
    lin[:, 1] = mesh1.nodes()
    zc = Trajectory(mesh1, np.zeros((18, 8)))
    assert cost_integral(Trajectory(mesh1, lin), zc, w) == pytest.approx(0.5, abs=1e-15)


def test_cost_integral_mesh_mismatch():
    w = CostWeights()
    a = Trajectory(TimeMesh(0.0, 1.0, 4), np.zeros((5, 9)))
    b = Trajectory(TimeMesh(0.0, 1.0, 5), np.zeros((6, 8)))
    with pytest.raises(ValueError, match="mesh"):
        cost_integral(a, b, w)
