"""Backend selection for the hot numerical kernels.

The compiled extension (`_core`, Cython) is preferred; the pure-Python
module (`_ref`) is a drop-in fallback used when the extension is missing or
when LEPRA_OCTL_PURE_PY is set to a non-empty value other than "0". Both
implement identical signatures and the same discretization, so results agree
to rounding; `benchmarks/bench_backends.py` compares their speed.

The wrappers here normalize inputs to contiguous float64 and turn the
kernels' status codes into IntegrationError.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import IntegrationError

if os.environ.get("LEPRA_OCTL_PURE_PY", "0") not in ("", "0"):
    from . import _ref as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _ref as _impl


def backend_name() -> str:
    return _impl.BACKEND


def _c2(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.float64)


def rk4_state(par, x0, controls, t0: float, h: float, n_steps: int) -> np.ndarray:
    out, bad = _impl.rk4_state(_c2(par), _c2(x0), _c2(controls), float(t0), float(h), int(n_steps))
    if bad >= 0:
        raise IntegrationError(
            f"non-finite state at node {bad} (t = {t0 + bad * h:g})", node=bad
        )
    return out


def rk4_costate(par, lamT, states, controls, t0: float, h: float, n_steps: int,
                verbatim: bool = False) -> np.ndarray:
    out, bad = _impl.rk4_costate(
        _c2(par), _c2(lamT), _c2(states), _c2(controls),
        float(t0), float(h), int(n_steps), bool(verbatim),
    )
    if bad >= 0:
        raise IntegrationError(
            f"non-finite costate at node {bad} (t = {t0 + bad * h:g})", node=bad
        )
    return out


def phi_objective(par, P: float, Q: float, R: float, states, costates, controls,
                  gradients, theta: float, upper_bounds) -> float:
    return float(
        _impl.phi_objective(
            _c2(par), float(P), float(Q), float(R),
            _c2(states), _c2(costates), _c2(controls), _c2(gradients),
            float(theta), _c2(upper_bounds),
        )
    )


def sweep_final_b(par_block, x0, t0: float, h: float, n_steps: int) -> np.ndarray:
    out, bad = _impl.sweep_final_b(_c2(par_block), _c2(x0), float(t0), float(h), int(n_steps))
    if bad >= 0:
        raise IntegrationError(f"non-finite state in sweep cell {bad}", node=bad)
    return out
