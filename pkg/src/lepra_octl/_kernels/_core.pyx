# cython: language_level=3
"""Compiled kernels: the hot inner loops behind the integrator and optimizer.

Mirrors `_ref.py` function for function (same signatures, same operation
order); see that module for documentation. The heavy loops run without the
GIL so callers can overlap independent integrations across threads.
"""

from libc.math cimport isfinite

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"

# parameter indices (model.PARAM_FIELDS order)
DEF OMEGA = 0
DEF BETA = 1
DEF GAMMA = 2
DEF MU1 = 3
DEF DELTA = 4
DEF ALPHA = 5
DEF Y = 6
DEF MU2 = 7
DEF A_IG = 8
DEF D_TA = 9
DEF D_I12 = 10
DEF D_I15 = 11
DEF D_I17 = 12
DEF M_IG = 13
DEF B_TA = 14
DEF M_TA = 15
DEF A_I10 = 16
DEF D_I10G = 17
DEF M_I10 = 18
DEF B_I12 = 19
DEF M_I12 = 20
DEF B_I15 = 21
DEF M_I15 = 22
DEF B_I17 = 23
DEF M_I17 = 24
DEF Q_IG = 25
DEF Q_TA = 26
DEF Q_I10 = 27
DEF Q_I12 = 28
DEF Q_I15 = 29
DEF Q_I17 = 30


cdef inline void _rhs(const double* par, const double* x, const double* u, double* out) noexcept nogil:
    cdef double S = x[0], I = x[1], B = x[2], Ig = x[3], Ta = x[4]
    cdef double I10 = x[5], I12 = x[6], I15 = x[7], I17 = x[8]
    cdef double D11 = u[0], D12 = u[1], D13 = u[2]
    cdef double D21 = u[3], D22 = u[4], D23 = u[5]
    cdef double D31 = u[6], D33 = u[7]
    cdef double inhibition
    out[0] = par[OMEGA] - par[BETA] * S * B - par[GAMMA] * S - par[MU1] * S - (D11 + D21 - D31) * S
    out[1] = par[BETA] * S * B - (par[DELTA] + par[MU1] + D12 + D22) * I
    out[2] = (par[ALPHA] - D23 * D23 - D33) * I - (par[Y] + par[MU2] + D13 * D13) * B
    inhibition = par[D_TA] * Ta + par[D_I12] * I12 + par[D_I15] * I15 + par[D_I17] * I17
    out[3] = par[A_IG] * I - inhibition * I - par[M_IG] * (Ig - par[Q_IG])
    out[4] = par[B_TA] * Ig * I - par[M_TA] * (Ta - par[Q_TA])
    out[5] = par[A_I10] * I - par[D_I10G] * Ig - par[M_I10] * (I10 - par[Q_I10])
    out[6] = par[B_I12] * Ig * I - par[M_I12] * (I12 - par[Q_I12])
    out[7] = par[B_I15] * Ig * I - par[M_I15] * (I15 - par[Q_I15])
    out[8] = par[B_I17] * Ig * I - par[M_I17] * (I17 - par[Q_I17])


cdef inline void _adjoint(const double* par, const double* lam, const double* x,
                          const double* u, int verbatim, double* out) noexcept nogil:
    cdef double S = x[0], I = x[1], B = x[2], Ig = x[3], Ta = x[4]
    cdef double I12 = x[6], I15 = x[7], I17 = x[8]
    cdef double D11 = u[0], D12 = u[1], D13 = u[2]
    cdef double D21 = u[3], D22 = u[4], D23 = u[5]
    cdef double D31 = u[6], D33 = u[7]
    cdef double l1 = lam[0], l2 = lam[1], l3 = lam[2], l4 = lam[3], l5 = lam[4]
    cdef double l6 = lam[5], l7 = lam[6], l8 = lam[7], l9 = lam[8]
    cdef double inhibition, dl2, decay4
    inhibition = par[D_TA] * Ta + par[D_I12] * I12 + par[D_I15] * I15 + par[D_I17] * I17
    out[0] = (par[BETA] * B + par[MU1] + par[GAMMA] + D11 + D21 - D31) * l1 - par[BETA] * B * l2
    dl2 = ((par[MU1] + par[DELTA] + D12 + D22) * l2
           - (par[ALPHA] - D23 * D23 - D33) * l3
           - par[A_IG] * l4
           - par[B_TA] * Ig * l5
           - par[A_I10] * l6
           - par[B_I12] * Ig * l7
           - par[B_I15] * Ig * l8
           - par[B_I17] * Ig * l9
           - 1.0)
    if not verbatim:
        dl2 += inhibition * l4
    out[1] = dl2
    out[2] = par[BETA] * S * l1 - par[BETA] * S * l2 + (par[Y] + par[MU2] + D13 * D13) * l3 - 1.0
    decay4 = par[M_IG] * I if verbatim else par[M_IG]
    out[3] = (decay4 * l4
              - par[B_TA] * I * l5
              + par[D_I10G] * l6
              - par[B_I12] * I * l7
              - par[B_I15] * I * l8
              - par[B_I17] * I * l9)
    out[4] = par[D_TA] * I * l4 + par[M_TA] * l5
    out[5] = par[M_I10] * l6
    out[6] = par[D_I12] * I * l4 + par[M_I12] * l7
    out[7] = par[D_I15] * I * l4 + par[M_I15] * l8
    out[8] = par[D_I17] * I * l4 + par[M_I17] * l9


def rk4_state(const double[::1] par, const double[::1] x0, const double[:, ::1] u,
              double t0, double h, int n_steps):
    cdef cnp.ndarray out_arr = np.empty((n_steps + 1, 9))
    cdef double[:, ::1] out = out_arr
    cdef double x[9]
    cdef double xa[9]
    cdef double k1[9]
    cdef double k2[9]
    cdef double k3[9]
    cdef double k4[9]
    cdef double u_mid[8]
    cdef int i, j, k
    cdef int bad = -1
    cdef bint ok
    for i in range(9):
        x[i] = x0[i]
        out[0, i] = x0[i]
    with nogil:
        for k in range(n_steps):
            for j in range(8):
                u_mid[j] = 0.5 * (u[k, j] + u[k + 1, j])
            _rhs(&par[0], x, &u[k, 0], k1)
            for i in range(9):
                xa[i] = x[i] + 0.5 * h * k1[i]
            _rhs(&par[0], xa, u_mid, k2)
            for i in range(9):
                xa[i] = x[i] + 0.5 * h * k2[i]
            _rhs(&par[0], xa, u_mid, k3)
            for i in range(9):
                xa[i] = x[i] + h * k3[i]
            _rhs(&par[0], xa, &u[k + 1, 0], k4)
            ok = True
            for i in range(9):
                x[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                ok = ok and isfinite(x[i])
            if not ok:
                bad = k + 1
                break
            for i in range(9):
                out[k + 1, i] = x[i]
    return out_arr, bad


def rk4_costate(const double[::1] par, const double[::1] lamT, const double[:, ::1] states,
                const double[:, ::1] u, double t0, double h, int n_steps, bint verbatim):
    cdef cnp.ndarray out_arr = np.empty((n_steps + 1, 9))
    cdef double[:, ::1] out = out_arr
    cdef double lam[9]
    cdef double la[9]
    cdef double k1[9]
    cdef double k2[9]
    cdef double k3[9]
    cdef double k4[9]
    cdef double x_mid[9]
    cdef double u_mid[8]
    cdef int i, j, k
    cdef int bad = -1
    cdef bint ok
    for i in range(9):
        lam[i] = lamT[i]
        out[n_steps, i] = lamT[i]
    with nogil:
        for k in range(n_steps, 0, -1):
            for i in range(9):
                x_mid[i] = 0.5 * (states[k, i] + states[k - 1, i])
            for j in range(8):
                u_mid[j] = 0.5 * (u[k, j] + u[k - 1, j])
            _adjoint(&par[0], lam, &states[k, 0], &u[k, 0], verbatim, k1)
            for i in range(9):
                la[i] = lam[i] - 0.5 * h * k1[i]
            _adjoint(&par[0], la, x_mid, u_mid, verbatim, k2)
            for i in range(9):
                la[i] = lam[i] - 0.5 * h * k2[i]
            _adjoint(&par[0], la, x_mid, u_mid, verbatim, k3)
            for i in range(9):
                la[i] = lam[i] - h * k3[i]
            _adjoint(&par[0], la, &states[k - 1, 0], &u[k - 1, 0], verbatim, k4)
            ok = True
            for i in range(9):
                lam[i] = lam[i] - (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                ok = ok and isfinite(lam[i])
            if not ok:
                bad = k - 1
                break
            for i in range(9):
                out[k - 1, i] = lam[i]
    return out_arr, bad


def phi_objective(const double[::1] par, double P, double Q, double R,
                  const double[:, ::1] states, const double[:, ::1] costates,
                  const double[:, ::1] u, const double[:, ::1] g,
                  double theta, const double[::1] ub):
    cdef double total = 0.0
    cdef double un[8]
    cdef double f[9]
    cdef double v, cost
    cdef int k, i, j
    cdef int n = states.shape[0]
    with nogil:
        for k in range(n):
            for j in range(8):
                v = u[k, j] - theta * g[k, j]
                if v < 0.0:
                    v = 0.0
                elif v > ub[j]:
                    v = ub[j]
                un[j] = v
            cost = (states[k, 1] + states[k, 2]
                    + P * (un[0] * un[0] + un[1] * un[1] + un[2] * un[2] * un[2])
                    + Q * (un[3] * un[3] + un[4] * un[4] + un[5] * un[5] * un[5])
                    + R * (un[6] * un[6] + un[7] * un[7]))
            _rhs(&par[0], &states[k, 0], un, f)
            for i in range(9):
                cost += costates[k, i] * f[i]
            total += cost
    return total


def sweep_final_b(const double[:, ::1] par_block, const double[::1] x0,
                  double t0, double h, int n_steps):
    cdef int m = par_block.shape[0]
    cdef cnp.ndarray b_arr = np.empty(m)
    cdef double[::1] b = b_arr
    cdef double x[9]
    cdef double xa[9]
    cdef double k1[9]
    cdef double k2[9]
    cdef double k3[9]
    cdef double k4[9]
    cdef double u0[8]
    cdef int c, i, k
    cdef int bad = -1
    cdef bint ok
    for i in range(8):
        u0[i] = 0.0
    with nogil:
        for c in range(m):
            for i in range(9):
                x[i] = x0[i]
            ok = True
            for k in range(n_steps):
                _rhs(&par_block[c, 0], x, u0, k1)
                for i in range(9):
                    xa[i] = x[i] + 0.5 * h * k1[i]
                _rhs(&par_block[c, 0], xa, u0, k2)
                for i in range(9):
                    xa[i] = x[i] + 0.5 * h * k2[i]
                _rhs(&par_block[c, 0], xa, u0, k3)
                for i in range(9):
                    xa[i] = x[i] + h * k3[i]
                _rhs(&par_block[c, 0], xa, u0, k4)
                for i in range(9):
                    x[i] = x[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                    ok = ok and isfinite(x[i])
                if not ok:
                    break
            if not ok:
                bad = c
                break
            b[c] = x[2]
    return b_arr, bad
