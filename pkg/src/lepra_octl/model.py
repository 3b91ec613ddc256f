"""Core model equations for the nine-compartment within-host leprosy system.

State vector layout (fixed order, used by every integrator and CSV schema):

    index  0  S     susceptible Schwann cells          [cells]
    index  1  I     infected Schwann cells             [cells]
    index  2  B     bacterial load                     [bacteria]
    index  3  IFNg  interferon-gamma concentration     [pg/ml]
    index  4  TNFa  tumour necrosis factor alpha       [pg/ml]
    index  5  IL10  interleukin-10                     [pg/ml]
    index  6  IL12  interleukin-12                     [pg/ml]
    index  7  IL15  interleukin-15                     [pg/ml]
    index  8  IL17  interleukin-17                     [pg/ml]

Control vector layout (8 channels; the (3,2) slot does not exist):

    index  0..2  D11 D12 D13   rifampin
    index  3..5  D21 D22 D23   dapsone
    index  6..7  D31 D33       clofazimine

D13 and D23 enter the bacterial-load dynamics squared, and their running-cost
penalty is cubic; all other controls enter linearly with quadratic penalties.

Everything here is a pure function of its arguments and safe to call from any
number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

STATE_FIELDS = ("S", "I", "B", "IFNg", "TNFa", "IL10", "IL12", "IL15", "IL17")
CONTROL_FIELDS = ("D11", "D12", "D13", "D21", "D22", "D23", "D31", "D33")
N_STATES = len(STATE_FIELDS)
N_CONTROLS = len(CONTROL_FIELDS)


@dataclass(frozen=True)
class ModelParams:
    """All rate constants and pre-infection baseline quantities.

    Field names follow the compartment naming above: `alpha_Igamma` is the
    IFN-gamma production rate, `delta_Igamma_Talpha` the inhibition of
    IFN-gamma by TNF-alpha, `mu_*` are decay rates and `Q_*` the baseline
    cytokine quantities the concentrations relax toward.
    """

    omega: float
    beta: float
    gamma: float
    mu1: float
    delta: float
    alpha: float
    y: float
    mu2: float
    alpha_Igamma: float
    delta_Igamma_Talpha: float
    delta_Igamma_I12: float
    delta_Igamma_I15: float
    delta_Igamma_I17: float
    mu_Igamma: float
    beta_Talpha: float
    mu_Talpha: float
    alpha_I10: float
    delta_I10_Igamma: float
    mu_I10: float
    beta_I12: float
    mu_I12: float
    beta_I15: float
    mu_I15: float
    beta_I17: float
    mu_I17: float
    Q_Igamma: float
    Q_Talpha: float
    Q_I10: float
    Q_I12: float
    Q_I15: float
    Q_I17: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"parameter {f.name} must be finite and nonnegative, got {v}")

    def as_array(self) -> np.ndarray:
        """Flat float64 vector in field order (the layout the kernels use)."""
        return np.array([getattr(self, f) for f in PARAM_FIELDS], dtype=np.float64)

    def with_overrides(self, **kw: float) -> "ModelParams":
        return replace(self, **kw)


PARAM_FIELDS = tuple(f.name for f in fields(ModelParams))


@dataclass(frozen=True)
class CostWeights:
    """Penalty weights for the three drugs (rifampin, dapsone, clofazimine)."""

    P: float = 1.0
    Q: float = 1.99
    R: float = 7.1

    def __post_init__(self):
        for name in ("P", "Q", "R"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"weight {name} must be finite and nonnegative, got {v}")


def rate_from_doubling_time(doubling_time_days: float) -> float:
    """Per-day rate equivalent of a doubling (or halving) time.

    ln(2)/T_double; the percentage rule of thumb 70/T_double divided by 100.
    """
    if doubling_time_days <= 0.0:
        raise ValueError("doubling time must be positive")
    return math.log(2.0) / doubling_time_days


def _check_finite(name: str, value) -> None:
    if not np.all(np.isfinite(value)):
        raise ValueError(f"non-finite {name}: {value!r}")


def state_rhs(t: float, x: np.ndarray, u: np.ndarray, p: ModelParams) -> np.ndarray:
    """Time derivative of the nine state compartments.

    Broadcasts over leading axes: x with shape (..., 9) and u with shape
    (..., 8) yield a (..., 9) derivative. The system is autonomous; t is
    accepted for integrator compatibility and ignored.
    """
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    _check_finite("state", x)
    _check_finite("controls", u)

    S, I, B = x[..., 0], x[..., 1], x[..., 2]
    Ig, Ta = x[..., 3], x[..., 4]
    I10, I12, I15, I17 = x[..., 5], x[..., 6], x[..., 7], x[..., 8]
    D11, D12, D13 = u[..., 0], u[..., 1], u[..., 2]
    D21, D22, D23 = u[..., 3], u[..., 4], u[..., 5]
    D31, D33 = u[..., 6], u[..., 7]

    dS = p.omega - p.beta * S * B - p.gamma * S - p.mu1 * S - (D11 + D21 - D31) * S
    dI = p.beta * S * B - (p.delta + p.mu1 + D12 + D22) * I
    dB = (p.alpha - D23**2 - D33) * I - (p.y + p.mu2 + D13**2) * B
    inhibition = (
        p.delta_Igamma_Talpha * Ta
        + p.delta_Igamma_I12 * I12
        + p.delta_Igamma_I15 * I15
        + p.delta_Igamma_I17 * I17
    )
    dIg = p.alpha_Igamma * I - inhibition * I - p.mu_Igamma * (Ig - p.Q_Igamma)
    dTa = p.beta_Talpha * Ig * I - p.mu_Talpha * (Ta - p.Q_Talpha)
    dI10 = p.alpha_I10 * I - p.delta_I10_Igamma * Ig - p.mu_I10 * (I10 - p.Q_I10)
    dI12 = p.beta_I12 * Ig * I - p.mu_I12 * (I12 - p.Q_I12)
    dI15 = p.beta_I15 * Ig * I - p.mu_I15 * (I15 - p.Q_I15)
    dI17 = p.beta_I17 * Ig * I - p.mu_I17 * (I17 - p.Q_I17)

    return np.stack([dS, dI, dB, dIg, dTa, dI10, dI12, dI15, dI17], axis=-1)


def running_cost(x: np.ndarray, u: np.ndarray, w: CostWeights):
    """Instantaneous cost: infected cells plus bacterial load plus drug penalties.

    Quadratic in every control except D13 and D23, which carry cubic
    penalties. Broadcasts over leading axes like `state_rhs`.
    """
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    _check_finite("state", x)
    _check_finite("controls", u)
    I, B = x[..., 1], x[..., 2]
    D11, D12, D13 = u[..., 0], u[..., 1], u[..., 2]
    D21, D22, D23 = u[..., 3], u[..., 4], u[..., 5]
    D31, D33 = u[..., 6], u[..., 7]
    cost = (
        I
        + B
        + w.P * (D11**2 + D12**2 + D13**3)
        + w.Q * (D21**2 + D22**2 + D23**3)
        + w.R * (D31**2 + D33**2)
    )
    return float(cost) if cost.ndim == 0 else cost


def hamiltonian(x: np.ndarray, lam: np.ndarray, u: np.ndarray, p: ModelParams, w: CostWeights):
    """Running cost plus costate-weighted dynamics."""
    lam = np.asarray(lam, dtype=np.float64)
    _check_finite("costate", lam)
    f = state_rhs(0.0, x, u, p)
    h = running_cost(x, u, w) + np.sum(lam * f, axis=-1)
    return float(h) if np.ndim(h) == 0 else h


def adjoint_rhs(
    t: float,
    lam: np.ndarray,
    x: np.ndarray,
    u: np.ndarray,
    p: ModelParams,
    mode: str = "derived",
) -> np.ndarray:
    """Time derivative of the nine costate variables.

    mode="derived" is the negative state-gradient of the Hamiltonian and is
    consistent with `control_gradient` and `hamiltonian` (finite-difference
    checkable). mode="paper-verbatim" switches two rows to an alternative
    published form: the IFN-gamma row gains an extra factor of I on its decay
    term, and the infected-cell row drops the inhibition-bracket coupling
    into the IFN-gamma costate.
    """
    if mode not in ("derived", "paper-verbatim"):
        raise ValueError(f"unknown adjoint mode {mode!r}")
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    _check_finite("state", x)
    _check_finite("controls", u)
    _check_finite("costate", lam)

    S, I, B = x[..., 0], x[..., 1], x[..., 2]
    Ig, Ta = x[..., 3], x[..., 4]
    I12, I15, I17 = x[..., 6], x[..., 7], x[..., 8]
    D11, D12, D13 = u[..., 0], u[..., 1], u[..., 2]
    D21, D22, D23 = u[..., 3], u[..., 4], u[..., 5]
    D31, D33 = u[..., 6], u[..., 7]
    l1, l2, l3 = lam[..., 0], lam[..., 1], lam[..., 2]
    l4, l5, l6 = lam[..., 3], lam[..., 4], lam[..., 5]
    l7, l8, l9 = lam[..., 6], lam[..., 7], lam[..., 8]

    inhibition = (
        p.delta_Igamma_Talpha * Ta
        + p.delta_Igamma_I12 * I12
        + p.delta_Igamma_I15 * I15
        + p.delta_Igamma_I17 * I17
    )

    dl1 = (p.beta * B + p.mu1 + p.gamma + D11 + D21 - D31) * l1 - p.beta * B * l2
    dl2 = (
        (p.mu1 + p.delta + D12 + D22) * l2
        - (p.alpha - D23**2 - D33) * l3
        - p.alpha_Igamma * l4
        - p.beta_Talpha * Ig * l5
        - p.alpha_I10 * l6
        - p.beta_I12 * Ig * l7
        - p.beta_I15 * Ig * l8
        - p.beta_I17 * Ig * l9
        - 1.0
    )
    if mode == "derived":
        dl2 = dl2 + inhibition * l4
    dl3 = p.beta * S * l1 - p.beta * S * l2 + (p.y + p.mu2 + D13**2) * l3 - 1.0
    decay4 = p.mu_Igamma * I if mode == "paper-verbatim" else p.mu_Igamma
    dl4 = (
        decay4 * l4
        - p.beta_Talpha * I * l5
        + p.delta_I10_Igamma * l6
        - p.beta_I12 * I * l7
        - p.beta_I15 * I * l8
        - p.beta_I17 * I * l9
    )
    dl5 = p.delta_Igamma_Talpha * I * l4 + p.mu_Talpha * l5
    dl6 = p.mu_I10 * l6
    dl7 = p.delta_Igamma_I12 * I * l4 + p.mu_I12 * l7
    dl8 = p.delta_Igamma_I15 * I * l4 + p.mu_I15 * l8
    dl9 = p.delta_Igamma_I17 * I * l4 + p.mu_I17 * l9

    # dl6 is state-independent; broadcast it to the common shape explicitly
    dl6 = np.broadcast_to(dl6, np.broadcast_shapes(np.shape(dl6), np.shape(dl1)))
    return np.stack([dl1, dl2, dl3, dl4, dl5, dl6, dl7, dl8, dl9], axis=-1)


def control_gradient(x: np.ndarray, lam: np.ndarray, u: np.ndarray, w: CostWeights) -> np.ndarray:
    """Gradient of the Hamiltonian with respect to each of the 8 controls."""
    x = np.asarray(x, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    _check_finite("state", x)
    _check_finite("costate", lam)
    _check_finite("controls", u)

    S, I, B = x[..., 0], x[..., 1], x[..., 2]
    l1, l2, l3 = lam[..., 0], lam[..., 1], lam[..., 2]
    D13, D23 = u[..., 2], u[..., 5]

    g11 = 2.0 * w.P * u[..., 0] - l1 * S
    g12 = 2.0 * w.P * u[..., 1] - l2 * I
    g13 = 3.0 * w.P * D13**2 - 2.0 * l3 * D13 * B
    g21 = 2.0 * w.Q * u[..., 3] - l1 * S
    g22 = 2.0 * w.Q * u[..., 4] - l2 * I
    g23 = 3.0 * w.Q * D23**2 - 2.0 * l3 * D23 * I
    g31 = 2.0 * w.R * u[..., 6] + l1 * S
    g33 = 2.0 * w.R * u[..., 7] - l3 * I

    return np.stack([g11, g12, g13, g21, g22, g23, g31, g33], axis=-1)


def clamp_controls(u: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    """Project each control onto [0, D_ij_max]. Idempotent."""
    u = np.asarray(u, dtype=np.float64)
    bounds = np.asarray(bounds, dtype=np.float64)
    if np.any(bounds < 0.0):
        raise ValueError("control bounds must be nonnegative")
    return np.clip(u, 0.0, bounds)
