"""Forward-backward sweep optimizer with Newton-gradient control updates.

Each sweep integrates the state forward with the current controls, the
costate backward from the zero terminal condition, then steps every control
node against the Hamiltonian gradient with a single line-searched step size,
projecting onto the admissible box. Iteration stops when the relative L1
change of every active control channel falls under the tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import _kernels as kernels
from .errors import IntegrationError
from .integrate import TimeMesh, Trajectory
from .model import CostWeights, ModelParams, control_gradient, running_cost
from .presets import DEFAULT_CONTROL_BOUNDS, HAZARD_RATIO_WEIGHTS

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
LINE_SEARCH_TOL = 1e-4

_DRUG_CHANNELS = {
    "rifampin": (0, 1, 2),
    "dapsone": (3, 4, 5),
    "clofazimine": (6, 7),
}


@dataclass(frozen=True)
class DrugMask:
    """Which drugs are administered; a drug switches all its controls together."""

    rifampin: bool = False
    dapsone: bool = False
    clofazimine: bool = False

    def channels(self) -> np.ndarray:
        """0/1 activation per control channel, in control order."""
        active = np.zeros(8)
        for drug, idx in _DRUG_CHANNELS.items():
            if getattr(self, drug):
                active[list(idx)] = 1.0
        return active

    def label(self) -> str:
        names = [d for d in ("rifampin", "dapsone", "clofazimine") if getattr(self, d)]
        return "+".join(names) if names else "none"

    @classmethod
    def none(cls) -> "DrugMask":
        return cls()

    @classmethod
    def full(cls) -> "DrugMask":
        return cls(True, True, True)

    @classmethod
    def from_names(cls, names) -> "DrugMask":
        names = set(names)
        unknown = names - set(_DRUG_CHANNELS)
        if unknown:
            raise ValueError(f"unknown drug name(s): {sorted(unknown)}")
        return cls(**{d: d in names for d in _DRUG_CHANNELS})


@dataclass(frozen=True)
class OctlConfig:
    mesh: TimeMesh
    control_bounds: np.ndarray = field(default_factory=lambda: DEFAULT_CONTROL_BOUNDS.copy())
    drug_mask: DrugMask = DrugMask.full()
    max_iterations: int = 200
    tolerance: float = 1e-3
    theta_max: float = 1.0
    weights: CostWeights = HAZARD_RATIO_WEIGHTS
    adjoint_verbatim: bool = False

    def __post_init__(self):
        bounds = np.asarray(self.control_bounds, dtype=np.float64)
        if bounds.shape != (8,) or np.any(bounds < 0.0) or not np.all(np.isfinite(bounds)):
            raise ValueError("control_bounds must be 8 nonnegative finite values")
        object.__setattr__(self, "control_bounds", bounds)
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.theta_max <= 0.0:
            raise ValueError("theta_max must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    def with_mask(self, mask: DrugMask) -> "OctlConfig":
        return replace(self, drug_mask=mask)


@dataclass
class OctlResult:
    """Converged (or last-iterate) trajectories and solve diagnostics.

    cost_history holds one objective value per sweep; the final entry is
    evaluated on the returned controls, so it matches `state`/`controls`.
    """

    state: Trajectory
    costate: Trajectory
    controls: Trajectory
    cost_history: list[float]
    converged: bool
    iterations: int


def simulate(x0: np.ndarray, p: ModelParams, mesh: TimeMesh,
             controls: Trajectory | None = None) -> Trajectory:
    """Forward model run on the selected kernel backend.

    With controls omitted this is the plain uncontrolled simulation.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    if not np.all(np.isfinite(x0)):
        raise ValueError("initial state must be finite")
    if controls is not None and controls.mesh != mesh:
        raise ValueError("controls must be defined on the simulation mesh")
    u = controls.values if controls is not None else np.zeros((mesh.n_nodes, 8))
    values = kernels.rk4_state(p.as_array(), x0, u, mesh.t0, mesh.h, mesh.n_steps)
    return Trajectory(mesh, values)


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   tol: float = LINE_SEARCH_TOL) -> tuple[float, float]:
    """Golden-section minimization of f on [lo, hi] to absolute tolerance tol.

    Deterministic; returns (argmin, min). Assumes f is cheap enough to probe
    a few dozen times.
    """
    if hi <= lo:
        raise ValueError("need hi > lo")
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def _phi(par, w, states, costates, u, g, theta, ub) -> float:
    return kernels.phi_objective(par, w.P, w.Q, w.R, states, costates, u, g, theta, ub)


def _line_search_arrays(par, w, states, costates, u, g, ub, theta_max) -> float:
    phi0 = _phi(par, w, states, costates, u, g, 0.0, ub)
    theta, phi_star = golden_section(
        lambda th: _phi(par, w, states, costates, u, g, th, ub), 0.0, theta_max
    )
    return theta if phi_star < phi0 else 0.0


def line_search_theta(controls: Trajectory, gradients: Trajectory, states: Trajectory,
                      costates: Trajectory, p: ModelParams, cfg: OctlConfig) -> float:
    """Step size minimizing the mesh-sum of the Hamiltonian along -gradients.

    Returns a value in [0, theta_max]; 0 signals that no step along the
    current direction improves the aggregated Hamiltonian (a stationary
    point for this sweep).
    """
    for traj in (controls, gradients, states, costates):
        if traj.mesh != cfg.mesh:
            raise ValueError("all trajectories must live on the configured mesh")
    return _line_search_arrays(
        p.as_array(), cfg.weights, states.values, costates.values,
        controls.values, gradients.values, cfg.control_bounds, cfg.theta_max,
    )


def _update_arrays(u, g, theta, ub, active) -> np.ndarray:
    out = u.copy()
    idx = active.astype(bool)
    out[:, idx] = np.clip(u[:, idx] - theta * g[:, idx], 0.0, ub[idx])
    return out


def update_controls(controls: Trajectory, gradients: Trajectory, theta: float,
                    bounds: np.ndarray, mask: DrugMask) -> Trajectory:
    """One projected gradient step on the active control channels."""
    if theta < 0.0:
        raise ValueError("theta must be nonnegative")
    if controls.mesh != gradients.mesh:
        raise ValueError("controls and gradients must share one mesh")
    ub = np.asarray(bounds, dtype=np.float64)
    new = _update_arrays(controls.values, gradients.values, theta, ub, mask.channels())
    return Trajectory(controls.mesh, new)


def _converged_arrays(prev, nxt, tolerance) -> bool:
    for j in range(prev.shape[1]):
        denom = float(np.sum(np.abs(nxt[:, j])))
        if denom == 0.0:
            continue
        if float(np.sum(np.abs(nxt[:, j] - prev[:, j]))) > tolerance * denom:
            return False
    return True


def convergence_test(prev: Trajectory, nxt: Trajectory, tolerance: float) -> bool:
    """Relative L1 change per control channel; identically-zero channels pass."""
    if prev.mesh != nxt.mesh:
        raise ValueError("trajectories must share one mesh")
    return _converged_arrays(prev.values, nxt.values, tolerance)


def _trapz_cost(states, u, w, h) -> float:
    return float(np.trapezoid(running_cost(states, u, w), dx=h))


def fbsm_solve(x0: np.ndarray, p: ModelParams, cfg: OctlConfig) -> OctlResult:
    """Run the forward-backward sweep from zero initial controls.

    The step size comes from the Hamiltonian line search, then is halved
    until the re-integrated cost does not increase (and the candidate state
    stays finite), so cost_history is non-increasing after the first entry.
    Non-convergence within max_iterations is reported through the result
    flag, not an exception; non-finite dynamics on an accepted iterate raise
    IntegrationError carrying the sweep index.
    """
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (9,) or not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be 9 finite values")
    mesh = cfg.mesh
    par = p.as_array()
    w = cfg.weights
    ub = cfg.control_bounds
    active = cfg.drug_mask.channels()
    lamT = np.zeros(9)

    def forward(ctrl):
        return kernels.rk4_state(par, x0, ctrl, mesh.t0, mesh.h, mesh.n_steps)

    def backward(traj, ctrl):
        return kernels.rk4_costate(
            par, lamT, traj, ctrl, mesh.t0, mesh.h, mesh.n_steps, cfg.adjoint_verbatim
        )

    u = np.zeros((mesh.n_nodes, 8))
    converged = not bool(active.any())
    updates = 0
    try:
        states = forward(u)
        costates = backward(states, u)
    except IntegrationError as err:
        err.iteration = updates
        raise
    cost = _trapz_cost(states, u, w, mesh.h)
    cost_history = [cost]

    while not converged and updates < cfg.max_iterations:
        g = control_gradient(states, costates, u, w) * active
        theta = _line_search_arrays(par, w, states, costates, u, g, ub, cfg.theta_max)

        # descent safeguard: shrink the step until the re-integrated cost is
        # non-increasing and the state stays finite
        u_next, states_next, cost_next = u, states, cost
        while theta > 0.0:
            u_cand = _update_arrays(u, g, theta, ub, active)
            try:
                states_cand = forward(u_cand)
            except IntegrationError:
                theta *= 0.5
                if theta < 1e-14:
                    theta = 0.0
                continue
            cost_cand = _trapz_cost(states_cand, u_cand, w, mesh.h)
            if cost_cand <= cost * (1.0 + 1e-12):
                u_next, states_next, cost_next = u_cand, states_cand, cost_cand
                break
            theta *= 0.5
            if theta < 1e-14:
                theta = 0.0

        updates += 1
        converged = _converged_arrays(u, u_next, cfg.tolerance)
        u, states, cost = u_next, states_next, cost_next
        try:
            costates = backward(states, u)
        except IntegrationError as err:
            err.iteration = updates
            raise
        cost_history.append(cost)

    return OctlResult(
        state=Trajectory(mesh, states),
        costate=Trajectory(mesh, costates),
        controls=Trajectory(mesh, u),
        cost_history=cost_history,
        converged=converged,
        iterations=updates,
    )
