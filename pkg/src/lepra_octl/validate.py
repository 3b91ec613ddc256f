"""Two-parameter sweeps of the uncontrolled model and the doubling check.

A sweep integrates the model forward with zero controls for every pair on a
uniform grid, recording the bacterial load at the observation day. Grid cells
are independent, so the work is chunked across threads (capped by the
LEPRA_OCTL_THREADS environment variable); outputs are identical for any
parallelism degree.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as kernels
from .errors import ConfigError, IntegrationError
from .model import ModelParams, PARAM_FIELDS


def thread_count() -> int:
    """Sweep/scenario parallelism cap from LEPRA_OCTL_THREADS (0/unset = auto)."""
    raw = os.environ.get("LEPRA_OCTL_THREADS", "").strip()
    if raw in ("", "0"):
        return min(8, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"LEPRA_OCTL_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


@dataclass
class SweepSpec:
    """One 2-D parameter sweep: param_x on the abscissa, param_y on the ordinate."""

    param_x: str
    param_y: str
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    initial_state: np.ndarray
    base_params: ModelParams
    grid_n: int = 50
    observe_day: float = 14.0
    # the infection transient pushes the fastest rate (beta*B) above 1e3/day
    # on the published grids; 0.001 keeps fixed-step RK4 well inside its
    # stability region there
    step: float = 0.001

    def __post_init__(self):
        for name in (self.param_x, self.param_y):
            if name not in PARAM_FIELDS:
                raise ConfigError(f"unknown parameter name {name!r}", key=name)
        if self.param_x == self.param_y:
            raise ConfigError("param_x and param_y must differ")
        if self.grid_n < 2:
            raise ConfigError(f"grid_n must be at least 2, got {self.grid_n}")
        for axis, (lo, hi) in (("x", self.x_range), ("y", self.y_range)):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise ConfigError(f"{axis}_range must be a nonempty interval, got ({lo}, {hi})")
        if self.observe_day <= 0.0:
            raise ConfigError(f"observe_day must be positive, got {self.observe_day}")
        if self.step <= 0.0:
            raise ConfigError(f"step must be positive, got {self.step}")
        self.initial_state = np.asarray(self.initial_state, dtype=np.float64)
        if self.initial_state.shape != (9,) or not np.all(np.isfinite(self.initial_state)):
            raise ConfigError("initial_state must be 9 finite values")


@dataclass
class HeatMatrix:
    """grid_n x grid_n observations; rows follow the ordinate axis (param_y)."""

    x_coords: np.ndarray
    y_coords: np.ndarray
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.values.shape != (self.y_coords.size, self.x_coords.size):
            raise ValueError("matrix shape must be (len(y_coords), len(x_coords))")


def heat_sweep(spec: SweepSpec) -> HeatMatrix:
    """Record B(observe_day) for every grid pair, zero controls throughout."""
    xs = np.linspace(spec.x_range[0], spec.x_range[1], spec.grid_n)
    ys = np.linspace(spec.y_range[0], spec.y_range[1], spec.grid_n)
    ix = PARAM_FIELDS.index(spec.param_x)
    iy = PARAM_FIELDS.index(spec.param_y)

    base = spec.base_params.as_array()
    m = spec.grid_n * spec.grid_n
    block = np.tile(base, (m, 1))
    # row-major over (ordinate, abscissa): cell i*grid_n + j holds (y_i, x_j)
    block[:, iy] = np.repeat(ys, spec.grid_n)
    block[:, ix] = np.tile(xs, spec.grid_n)

    n_steps = max(1, round(spec.observe_day / spec.step))
    h = spec.observe_day / n_steps

    def run_chunk(lo: int, hi: int) -> np.ndarray:
        try:
            return kernels.sweep_final_b(block[lo:hi], spec.initial_state, 0.0, h, n_steps)
        except IntegrationError as err:
            cell = lo + (err.node or 0)
            i, j = divmod(cell, spec.grid_n)
            raise IntegrationError(
                f"sweep diverged at {spec.param_y}={ys[i]:g}, {spec.param_x}={xs[j]:g}",
                node=cell,
            ) from err

    workers = min(thread_count(), m)
    if workers <= 1:
        flat = run_chunk(0, m)
    else:
        edges = np.linspace(0, m, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda se: run_chunk(*se), zip(edges[:-1], edges[1:])))
        flat = np.concatenate(parts)

    return HeatMatrix(x_coords=xs, y_coords=ys, values=flat.reshape(spec.grid_n, spec.grid_n))


@dataclass(frozen=True)
class DoublingSummary:
    fraction: float
    band: tuple[float, float]
    min_value: float
    max_value: float


def doubling_metric(matrix: HeatMatrix, b0: float, tol: float = 0.15) -> DoublingSummary:
    """Fraction of grid cells whose observed load sits within tol of twice b0."""
    if b0 <= 0.0:
        raise ValueError("b0 must be positive")
    lo, hi = 2.0 * b0 * (1.0 - tol), 2.0 * b0 * (1.0 + tol)
    inside = (matrix.values >= lo) & (matrix.values <= hi)
    return DoublingSummary(
        fraction=float(np.mean(inside)),
        band=(lo, hi),
        min_value=float(matrix.values.min()),
        max_value=float(matrix.values.max()),
    )
