"""Pure-Python kernels: the fallback backend.

Same call signatures and the same arithmetic as the compiled backend in
`_core.pyx`; the single-trajectory loops run on plain floats (mirroring the C
operation order), while the parameter-sweep kernel vectorizes across grid
cells with numpy. Status codes instead of exceptions: integration kernels
return (result, bad_index) with bad_index == -1 on success.

Parameter vectors follow the `model.PARAM_FIELDS` order.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

# parameter indices (model.PARAM_FIELDS order)
_OMEGA, _BETA, _GAMMA, _MU1, _DELTA, _ALPHA, _Y, _MU2 = range(8)
_A_IG, _D_TA, _D_I12, _D_I15, _D_I17, _M_IG = range(8, 14)
_B_TA, _M_TA, _A_I10, _D_I10G, _M_I10 = range(14, 19)
_B_I12, _M_I12, _B_I15, _M_I15, _B_I17, _M_I17 = range(19, 25)
_Q_IG, _Q_TA, _Q_I10, _Q_I12, _Q_I15, _Q_I17 = range(25, 31)


def _rhs(par, x, u, out):
    S, I, B, Ig, Ta, I10, I12, I15, I17 = x
    D11, D12, D13, D21, D22, D23, D31, D33 = u
    out[0] = par[_OMEGA] - par[_BETA] * S * B - par[_GAMMA] * S - par[_MU1] * S - (D11 + D21 - D31) * S
    out[1] = par[_BETA] * S * B - (par[_DELTA] + par[_MU1] + D12 + D22) * I
    out[2] = (par[_ALPHA] - D23 * D23 - D33) * I - (par[_Y] + par[_MU2] + D13 * D13) * B
    inhibition = par[_D_TA] * Ta + par[_D_I12] * I12 + par[_D_I15] * I15 + par[_D_I17] * I17
    out[3] = par[_A_IG] * I - inhibition * I - par[_M_IG] * (Ig - par[_Q_IG])
    out[4] = par[_B_TA] * Ig * I - par[_M_TA] * (Ta - par[_Q_TA])
    out[5] = par[_A_I10] * I - par[_D_I10G] * Ig - par[_M_I10] * (I10 - par[_Q_I10])
    out[6] = par[_B_I12] * Ig * I - par[_M_I12] * (I12 - par[_Q_I12])
    out[7] = par[_B_I15] * Ig * I - par[_M_I15] * (I15 - par[_Q_I15])
    out[8] = par[_B_I17] * Ig * I - par[_M_I17] * (I17 - par[_Q_I17])


def _adjoint(par, lam, x, u, verbatim, out):
    S, I, B, Ig, Ta, I10, I12, I15, I17 = x
    D11, D12, D13, D21, D22, D23, D31, D33 = u
    l1, l2, l3, l4, l5, l6, l7, l8, l9 = lam
    inhibition = par[_D_TA] * Ta + par[_D_I12] * I12 + par[_D_I15] * I15 + par[_D_I17] * I17
    out[0] = (par[_BETA] * B + par[_MU1] + par[_GAMMA] + D11 + D21 - D31) * l1 - par[_BETA] * B * l2
    dl2 = (
        (par[_MU1] + par[_DELTA] + D12 + D22) * l2
        - (par[_ALPHA] - D23 * D23 - D33) * l3
        - par[_A_IG] * l4
        - par[_B_TA] * Ig * l5
        - par[_A_I10] * l6
        - par[_B_I12] * Ig * l7
        - par[_B_I15] * Ig * l8
        - par[_B_I17] * Ig * l9
        - 1.0
    )
    if not verbatim:
        dl2 += inhibition * l4
    out[1] = dl2
    out[2] = par[_BETA] * S * l1 - par[_BETA] * S * l2 + (par[_Y] + par[_MU2] + D13 * D13) * l3 - 1.0
    decay4 = par[_M_IG] * I if verbatim else par[_M_IG]
    out[3] = (
        decay4 * l4
        - par[_B_TA] * I * l5
        + par[_D_I10G] * l6
        - par[_B_I12] * I * l7
        - par[_B_I15] * I * l8
        - par[_B_I17] * I * l9
    )
    out[4] = par[_D_TA] * I * l4 + par[_M_TA] * l5
    out[5] = par[_M_I10] * l6
    out[6] = par[_D_I12] * I * l4 + par[_M_I12] * l7
    out[7] = par[_D_I15] * I * l4 + par[_M_I15] * l8
    out[8] = par[_D_I17] * I * l4 + par[_M_I17] * l9


def rk4_state(par, x0, u, t0, h, n_steps):
    """Forward RK4 for the state system. Returns (nodes array, bad_node)."""
    par = [float(v) for v in par]
    out = np.empty((n_steps + 1, 9))
    out[0] = x0
    x = [float(v) for v in x0]
    k1 = [0.0] * 9
    k2 = [0.0] * 9
    k3 = [0.0] * 9
    k4 = [0.0] * 9
    xa = [0.0] * 9
    u_mid = [0.0] * 8
    for k in range(n_steps):
        u_lo = [float(v) for v in u[k]]
        u_hi = [float(v) for v in u[k + 1]]
        for j in range(8):
            u_mid[j] = 0.5 * (u_lo[j] + u_hi[j])
        _rhs(par, x, u_lo, k1)
        for i in range(9):
            xa[i] = x[i] + 0.5 * h * k1[i]
        _rhs(par, xa, u_mid, k2)
        for i in range(9):
            xa[i] = x[i] + 0.5 * h * k2[i]
        _rhs(par, xa, u_mid, k3)
        for i in range(9):
            xa[i] = x[i] + h * k3[i]
        _rhs(par, xa, u_hi, k4)
        ok = True
        for i in range(9):
            x[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            ok = ok and math.isfinite(x[i])
        if not ok:
            return out, k + 1
        out[k + 1] = x
    return out, -1


def rk4_costate(par, lamT, states, u, t0, h, n_steps, verbatim):
    """Backward RK4 for the costate system. Returns (nodes array, bad_node)."""
    par = [float(v) for v in par]
    out = np.empty((n_steps + 1, 9))
    out[n_steps] = lamT
    lam = [float(v) for v in lamT]
    k1 = [0.0] * 9
    k2 = [0.0] * 9
    k3 = [0.0] * 9
    k4 = [0.0] * 9
    la = [0.0] * 9
    x_mid = [0.0] * 9
    u_mid = [0.0] * 8
    for k in range(n_steps, 0, -1):
        x_hi = [float(v) for v in states[k]]
        x_lo = [float(v) for v in states[k - 1]]
        u_hi = [float(v) for v in u[k]]
        u_lo = [float(v) for v in u[k - 1]]
        for i in range(9):
            x_mid[i] = 0.5 * (x_hi[i] + x_lo[i])
        for j in range(8):
            u_mid[j] = 0.5 * (u_hi[j] + u_lo[j])
        _adjoint(par, lam, x_hi, u_hi, verbatim, k1)
        for i in range(9):
            la[i] = lam[i] - 0.5 * h * k1[i]
        _adjoint(par, la, x_mid, u_mid, verbatim, k2)
        for i in range(9):
            la[i] = lam[i] - 0.5 * h * k2[i]
        _adjoint(par, la, x_mid, u_mid, verbatim, k3)
        for i in range(9):
            la[i] = lam[i] - h * k3[i]
        _adjoint(par, la, x_lo, u_lo, verbatim, k4)
        ok = True
        for i in range(9):
            lam[i] = lam[i] - (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            ok = ok and math.isfinite(lam[i])
        if not ok:
            return out, k - 1
        out[k - 1] = lam
    return out, -1


def phi_objective(par, P, Q, R, states, costates, u, g, theta, ub):
    """Mesh sum of the Hamiltonian with controls stepped to clamp(u - theta*g)."""
    par = np.asarray(par)
    un = np.clip(u - theta * g, 0.0, ub)
    S, I, B = states[:, 0], states[:, 1], states[:, 2]
    Ig, Ta = states[:, 3], states[:, 4]
    I10, I12, I15, I17 = states[:, 5], states[:, 6], states[:, 7], states[:, 8]
    D11, D12, D13 = un[:, 0], un[:, 1], un[:, 2]
    D21, D22, D23 = un[:, 3], un[:, 4], un[:, 5]
    D31, D33 = un[:, 6], un[:, 7]

    cost = (
        I
        + B
        + P * (D11**2 + D12**2 + D13**3)
        + Q * (D21**2 + D22**2 + D23**3)
        + R * (D31**2 + D33**2)
    )
    f = np.empty_like(states)
    f[:, 0] = par[_OMEGA] - par[_BETA] * S * B - par[_GAMMA] * S - par[_MU1] * S - (D11 + D21 - D31) * S
    f[:, 1] = par[_BETA] * S * B - (par[_DELTA] + par[_MU1] + D12 + D22) * I
    f[:, 2] = (par[_ALPHA] - D23**2 - D33) * I - (par[_Y] + par[_MU2] + D13**2) * B
    inhibition = par[_D_TA] * Ta + par[_D_I12] * I12 + par[_D_I15] * I15 + par[_D_I17] * I17
    f[:, 3] = par[_A_IG] * I - inhibition * I - par[_M_IG] * (Ig - par[_Q_IG])
    f[:, 4] = par[_B_TA] * Ig * I - par[_M_TA] * (Ta - par[_Q_TA])
    f[:, 5] = par[_A_I10] * I - par[_D_I10G] * Ig - par[_M_I10] * (I10 - par[_Q_I10])
    f[:, 6] = par[_B_I12] * Ig * I - par[_M_I12] * (I12 - par[_Q_I12])
    f[:, 7] = par[_B_I15] * Ig * I - par[_M_I15] * (I15 - par[_Q_I15])
    f[:, 8] = par[_B_I17] * Ig * I - par[_M_I17] * (I17 - par[_Q_I17])
    return float(np.sum(cost) + np.sum(costates * f))


def sweep_final_b(par_block, x0, t0, h, n_steps):
    """Zero-control forward integration of many parameter sets at once.

    par_block has one parameter vector per row; returns (B at the final
    time per row, index of the first row that went non-finite or -1).
    """
    par_block = np.asarray(par_block, dtype=np.float64)
    m = par_block.shape[0]
    cols = [par_block[:, j] for j in range(par_block.shape[1])]
    x = np.tile(np.asarray(x0, dtype=np.float64), (m, 1))

    def rhs(xx):
        S, I, B = xx[:, 0], xx[:, 1], xx[:, 2]
        Ig, Ta = xx[:, 3], xx[:, 4]
        I10, I12, I15, I17 = xx[:, 5], xx[:, 6], xx[:, 7], xx[:, 8]
        f = np.empty_like(xx)
        f[:, 0] = cols[_OMEGA] - cols[_BETA] * S * B - cols[_GAMMA] * S - cols[_MU1] * S
        f[:, 1] = cols[_BETA] * S * B - (cols[_DELTA] + cols[_MU1]) * I
        f[:, 2] = cols[_ALPHA] * I - (cols[_Y] + cols[_MU2]) * B
        inhibition = cols[_D_TA] * Ta + cols[_D_I12] * I12 + cols[_D_I15] * I15 + cols[_D_I17] * I17
        f[:, 3] = cols[_A_IG] * I - inhibition * I - cols[_M_IG] * (Ig - cols[_Q_IG])
        f[:, 4] = cols[_B_TA] * Ig * I - cols[_M_TA] * (Ta - cols[_Q_TA])
        f[:, 5] = cols[_A_I10] * I - cols[_D_I10G] * Ig - cols[_M_I10] * (I10 - cols[_Q_I10])
        f[:, 6] = cols[_B_I12] * Ig * I - cols[_M_I12] * (I12 - cols[_Q_I12])
        f[:, 7] = cols[_B_I15] * Ig * I - cols[_M_I15] * (I15 - cols[_Q_I15])
        f[:, 8] = cols[_B_I17] * Ig * I - cols[_M_I17] * (I17 - cols[_Q_I17])
        return f

    for _ in range(n_steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        finite = np.isfinite(x).all(axis=1)
        if not finite.all():
            return x[:, 2].copy(), int(np.argmin(finite))
    return x[:, 2].copy(), -1
