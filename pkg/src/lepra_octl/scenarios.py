"""Drug-regimen scenarios: run, summarize, rank.

The standard batch covers the eight masks (no drugs, each single drug, each
pair, full multi-drug therapy). Scenarios are independent and may run
concurrently; each owns its optimizer state.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .integrate import Trajectory, cost_integral
from .model import ModelParams, STATE_FIELDS
from .octl import DrugMask, OctlConfig, fbsm_solve, simulate
from .validate import thread_count

CYTOKINE_FIELDS = STATE_FIELDS[3:]
TREND_DEADBAND = 1e-9

STANDARD_MASKS = (
    DrugMask.none(),
    DrugMask(rifampin=True),
    DrugMask(dapsone=True),
    DrugMask(clofazimine=True),
    DrugMask(rifampin=True, dapsone=True),
    DrugMask(rifampin=True, clofazimine=True),
    DrugMask(dapsone=True, clofazimine=True),
    DrugMask.full(),
)


@dataclass
class ScenarioReport:
    scenario: str
    final_state: np.ndarray
    avg_I: float
    avg_B: float
    cost: float
    trends: dict[str, str]
    converged: bool
    iterations: int


def _sign(delta: float) -> str:
    if delta > TREND_DEADBAND:
        return "+"
    if delta < -TREND_DEADBAND:
        return "-"
    return "0"


def _summarize(mask: DrugMask, state: Trajectory, cost: float,
               converged: bool, iterations: int) -> ScenarioReport:
    values = state.values
    span = state.mesh.T - state.mesh.t0
    trends = {
        name: _sign(values[-1, 3 + k] - values[0, 3 + k])
        for k, name in enumerate(CYTOKINE_FIELDS)
    }
    return ScenarioReport(
        scenario=mask.label(),
        final_state=values[-1].copy(),
        avg_I=float(np.trapezoid(values[:, 1], dx=state.mesh.h)) / span,
        avg_B=float(np.trapezoid(values[:, 2], dx=state.mesh.h)) / span,
        cost=cost,
        trends=trends,
        converged=converged,
        iterations=iterations,
    )


def run_scenario(mask: DrugMask, x0: np.ndarray, p: ModelParams,
                 cfg: OctlConfig) -> tuple[ScenarioReport, Trajectory, Trajectory]:
    """Solve (or, for the all-off mask, plainly simulate) one regimen.

    Returns the summary plus the state and control trajectories for
    serialization.
    """
    if not mask.channels().any():
        state = simulate(x0, p, cfg.mesh)
        controls = Trajectory(cfg.mesh, np.zeros((cfg.mesh.n_nodes, 8)))
        cost = cost_integral(state, controls, cfg.weights)
        report = _summarize(mask, state, cost, converged=True, iterations=0)
        return report, state, controls
    res = fbsm_solve(x0, p, cfg.with_mask(mask))
    report = _summarize(mask, res.state, res.cost_history[-1], res.converged, res.iterations)
    return report, res.state, res.controls


def run_all_scenarios(x0: np.ndarray, p: ModelParams, cfg: OctlConfig,
                      masks=STANDARD_MASKS, max_workers: int | None = None):
    """Run a batch of masks, preserving input order in the result list."""
    workers = max_workers if max_workers is not None else thread_count()
    workers = min(workers, len(masks))
    if workers <= 1:
        return [run_scenario(m, x0, p, cfg) for m in masks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda m: run_scenario(m, x0, p, cfg), masks))


_METRICS = {
    "final_I": lambda r: float(r.final_state[1]),
    "final_B": lambda r: float(r.final_state[2]),
    "avg_I": lambda r: r.avg_I,
    "avg_B": lambda r: r.avg_B,
}


def compare_scenarios(reports, metric: str) -> list[str]:
    """Scenario ids ordered most effective first (ascending metric), ties by id."""
    if metric not in _METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {sorted(_METRICS)}")
    if len(reports) < 2:
        raise ValueError("need at least two reports to rank")
    key = _METRICS[metric]
    return [r.scenario for r in sorted(reports, key=lambda r: (key(r), r.scenario))]


def susceptible_direction(reports) -> dict[str, str]:
    """Sign of S(T) against the no-drug baseline, per controlled scenario."""
    baseline = next((r for r in reports if r.scenario == "none"), None)
    if baseline is None:
        raise ValueError("missing the all-off baseline report")
    s_base = float(baseline.final_state[0])
    return {
        r.scenario: _sign(float(r.final_state[0]) - s_base)
        for r in reports
        if r.scenario != "none"
    }
