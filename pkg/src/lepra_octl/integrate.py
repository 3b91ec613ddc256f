"""Fixed-step classical RK4 on a shared uniform time mesh.

The optimizer needs state, costate and controls sampled on one common mesh,
so there is no adaptive stepping here. Exogenous trajectories (controls during
the state pass, state and controls during the costate pass) are sampled at
half-steps by averaging the two adjacent nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import IntegrationError
from .model import CostWeights, running_cost


@dataclass(frozen=True)
class TimeMesh:
    t0: float
    T: float
    n_steps: int

    def __post_init__(self):
        if not self.T > self.t0:
            raise ValueError(f"need T > t0, got [{self.t0}, {self.T}]")
        if self.n_steps < 1:
            raise ValueError(f"need n_steps >= 1, got {self.n_steps}")

    @property
    def h(self) -> float:
        return (self.T - self.t0) / self.n_steps

    @property
    def n_nodes(self) -> int:
        return self.n_steps + 1

    def nodes(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.n_steps + 1)


@dataclass
class Trajectory:
    """Per-node values (one row per mesh node) of a state, costate or control."""

    mesh: TimeMesh
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if self.values.shape[0] != self.mesh.n_nodes:
            raise ValueError(
                f"trajectory has {self.values.shape[0]} rows, mesh has {self.mesh.n_nodes} nodes"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("trajectory values must be finite")

    @property
    def times(self) -> np.ndarray:
        return self.mesh.nodes()


def _as_row(value) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=np.float64))
    if arr.ndim != 1:
        raise ValueError("initial value must be a scalar or 1-D vector")
    return arr


def integrate_forward(
    rhs: Callable,
    x0,
    controls: Trajectory | None,
    mesh: TimeMesh,
    p=None,
) -> Trajectory:
    """March x' = rhs(t, x, u, p) from mesh.t0 to mesh.T with classical RK4.

    `controls` must live on the same mesh (or be None for uncontrolled
    systems); its half-step values are adjacent-node averages. Node 0 of the
    result equals x0 exactly.
    """
    x0 = _as_row(x0)
    if controls is not None and controls.mesh != mesh:
        raise ValueError("controls must be defined on the integration mesh")
    u = controls.values if controls is not None else None
    h = mesh.h
    out = np.empty((mesh.n_nodes, x0.size))
    out[0] = x0
    x = x0.astype(np.float64)
    for k in range(mesh.n_steps):
        t = mesh.t0 + k * h
        u_lo = u[k] if u is not None else None
        u_hi = u[k + 1] if u is not None else None
        u_mid = 0.5 * (u_lo + u_hi) if u is not None else None
        k1 = np.asarray(rhs(t, x, u_lo, p), dtype=np.float64)
        k2 = np.asarray(rhs(t + 0.5 * h, x + 0.5 * h * k1, u_mid, p), dtype=np.float64)
        k3 = np.asarray(rhs(t + 0.5 * h, x + 0.5 * h * k2, u_mid, p), dtype=np.float64)
        k4 = np.asarray(rhs(t + h, x + h * k3, u_hi, p), dtype=np.float64)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise IntegrationError(
                f"non-finite state at node {k + 1} (t = {t + h:g})", node=k + 1
            )
        out[k + 1] = x
    return Trajectory(mesh, out)


def integrate_backward(
    rhs: Callable,
    lamT,
    states: Trajectory | None,
    controls: Trajectory | None,
    mesh: TimeMesh,
    p=None,
) -> Trajectory:
    """March lam' = rhs(t, lam, x, u, p) from mesh.T back to mesh.t0.

    Node n_steps of the result equals lamT exactly (the terminal condition);
    state and control half-step values are adjacent-node averages.
    """
    lamT = _as_row(lamT)
    for name, traj in (("states", states), ("controls", controls)):
        if traj is not None and traj.mesh != mesh:
            raise ValueError(f"{name} must be defined on the integration mesh")
    xs = states.values if states is not None else None
    us = controls.values if controls is not None else None
    h = mesh.h
    out = np.empty((mesh.n_nodes, lamT.size))
    out[mesh.n_steps] = lamT
    lam = lamT.astype(np.float64)

    def sample(arr, k):
        return arr[k] if arr is not None else None

    def mid(arr, k):
        return 0.5 * (arr[k] + arr[k - 1]) if arr is not None else None

    for k in range(mesh.n_steps, 0, -1):
        t = mesh.t0 + k * h
        k1 = np.asarray(rhs(t, lam, sample(xs, k), sample(us, k), p), dtype=np.float64)
        k2 = np.asarray(
            rhs(t - 0.5 * h, lam - 0.5 * h * k1, mid(xs, k), mid(us, k), p), dtype=np.float64
        )
        k3 = np.asarray(
            rhs(t - 0.5 * h, lam - 0.5 * h * k2, mid(xs, k), mid(us, k), p), dtype=np.float64
        )
        k4 = np.asarray(
            rhs(t - h, lam - h * k3, sample(xs, k - 1), sample(us, k - 1), p), dtype=np.float64
        )
        lam = lam - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(lam)):
            raise IntegrationError(
                f"non-finite costate at node {k - 1} (t = {t - h:g})", node=k - 1
            )
        out[k - 1] = lam
    return Trajectory(mesh, out)


def cost_integral(states: Trajectory, controls: Trajectory, w: CostWeights) -> float:
    """Composite trapezoidal rule over the running cost at the mesh nodes."""
    if states.mesh != controls.mesh:
        raise ValueError("states and controls must share one mesh")
    integrand = running_cost(states.values, controls.values, w)
    return float(np.trapezoid(integrand, dx=states.mesh.h))
