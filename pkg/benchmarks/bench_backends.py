#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the four hot kernels on production-sized inputs: the forward state
pass and backward costate pass on a 100-day mesh, the line-search objective
over that mesh, and a parameter-sweep block at the validation resolution.

    python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

import lepra_octl._kernels._ref as ref
from lepra_octl import PRESET_SECTION_5_2, PRESET_TABLE_1, initial_state_preset

try:
    import lepra_octl._kernels._core as core
except ImportError:
    core = None


def best_of(repeat, fn, *args):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="timing repeats (default 3)")
    args = parser.parse_args()

    par = PRESET_SECTION_5_2.as_array()
    x0 = initial_state_preset("simulation")
    n = 10000
    h = 0.01
    rng = np.random.default_rng(0)
    u = np.clip(rng.uniform(0.0, 0.3, (n + 1, 8)), 0.0, 1.0)
    u[:, 5] = 0.0
    u[:, 7] = np.minimum(u[:, 7], 0.15)

    states, bad = ref.rk4_state(par, x0, u, 0.0, h, n)
    assert bad == -1
    costates, _ = ref.rk4_costate(par, np.zeros(9), states, u, 0.0, h, n, False)
    g = rng.normal(0.0, 1.0, (n + 1, 8))
    ub = np.ones(8)

    sweep_n = 144
    block = np.tile(PRESET_TABLE_1.as_array(), (sweep_n, 1))
    block[:, 5] = np.linspace(0.0563, 0.0763, sweep_n)
    xv = initial_state_preset("validation")

    cases = [
        ("forward state pass (10k steps)", "rk4_state", (par, x0, u, 0.0, h, n)),
        ("backward costate pass (10k steps)", "rk4_costate",
         (par, np.zeros(9), states, u, 0.0, h, n, False)),
        ("line-search objective (10k nodes)", "phi_objective",
         (par, 1.0, 1.99, 7.1, states, costates, u, g, 0.05, ub)),
        (f"sweep block ({sweep_n} cells x 14k steps)", "sweep_final_b",
         (block, xv, 0.0, 0.001, 14000)),
    ]

    print(f"{'kernel':<38} {'python':>10} {'compiled':>10} {'speedup':>9}")
    for label, name, call_args in cases:
        t_ref, out_ref = best_of(args.repeat, getattr(ref, name), *call_args)
        if core is None:
            print(f"{label:<38} {t_ref * 1e3:9.1f}ms {'n/a':>10} {'n/a':>9}")
            continue
        t_core, out_core = best_of(args.repeat, getattr(core, name), *call_args)
        a = out_ref[0] if isinstance(out_ref, tuple) else out_ref
        b = out_core[0] if isinstance(out_core, tuple) else out_core
        err = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        print(
            f"{label:<38} {t_ref * 1e3:9.1f}ms {t_core * 1e3:9.1f}ms {t_ref / t_core:8.1f}x"
            + (f"   (max |diff| {err:.2e})" if err > 1e-9 else "")
        )
    if core is None:
        print("\ncompiled backend not built; install with `pip install -e . --no-build-isolation`")


if __name__ == "__main__":
    main()
