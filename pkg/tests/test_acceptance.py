"""Acceptance suite: one test per release criterion, at full problem scale.

Run with `pytest -s tests/test_acceptance.py` to see one PASS/FAIL line per
criterion. Criteria and tolerances are pinned here; nothing is deferred to
later calibration.
"""

import math

import numpy as np
import pytest

import lepra_octl as lo
from lepra_octl.cli import main as cli_main
from lepra_octl.octl import DrugMask, OctlConfig, fbsm_solve
from lepra_octl.scenarios import _summarize, compare_scenarios, run_scenario, susceptible_direction

P52 = lo.PRESET_SECTION_5_2
T1 = lo.PRESET_TABLE_1
X_SIM = lo.initial_state_preset("simulation")
X_VAL = lo.initial_state_preset("validation")
FULL_MESH = lo.TimeMesh(0.0, 100.0, 10000)

SINGLES = ("rifampin", "dapsone", "clofazimine")
PAIRS = ("rifampin+dapsone", "rifampin+clofazimine", "dapsone+clofazimine")
MDT = "rifampin+dapsone+clofazimine"


def check(criterion: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}{' - ' + detail if detail else ''}")
    assert ok, f"criterion {criterion} failed: {detail}"


@pytest.fixture(scope="module")
def scenario_batch():
    """Baseline report plus the seven controlled solves at full scale."""
    cfg = OctlConfig(mesh=FULL_MESH)
    baseline, _, _ = run_scenario(DrugMask.none(), X_SIM, P52, cfg)
    results = {}
    reports = {"none": baseline}
    for mask in lo.STANDARD_MASKS[1:]:
        res = fbsm_solve(X_SIM, P52, cfg.with_mask(mask))
        results[mask.label()] = res
        reports[mask.label()] = _summarize(
            mask, res.state, res.cost_history[-1], res.converged, res.iterations
        )
    return cfg, reports, results


@pytest.fixture(scope="module")
def published_sweeps():
    common = dict(
        param_x="alpha",
        x_range=(0.0563, 0.0763),
        initial_state=X_VAL,
        base_params=T1,
        grid_n=50,
        observe_day=14.0,
    )
    ag = lo.heat_sweep(lo.SweepSpec(param_y="gamma", y_range=(0.15, 0.2090), **common))
    ay = lo.heat_sweep(lo.SweepSpec(param_y="y", y_range=(0.0002, 0.5003), **common))
    return ag, ay


def test_criterion_01_doubling_validation(published_sweeps):
    ag, ay = published_sweeps
    for name, matrix in (("alpha-gamma", ag), ("alpha-y", ay)):
        summary = lo.doubling_metric(matrix, b0=40.0, tol=0.15)
        detail = (
            f"{name}: B(14) in [{summary.min_value:.2f}, {summary.max_value:.2f}], "
            f"doubling band {summary.band}, fraction {summary.fraction:.4f}"
        )
        check(f"1 ({name} sweep reaches doubling)", summary.fraction > 0.0, detail)


def test_criterion_02_adjoint_and_gradient_consistency():
    rng = np.random.default_rng(2024)
    w = lo.HAZARD_RATIO_WEIGHTS
    worst_adj = worst_grad = 0.0
    for _ in range(100):
        x = np.empty(9)
        x[0] = rng.uniform(0.0, 600.0)
        x[1] = rng.uniform(0.0, 800.0)
        x[2] = rng.uniform(0.0, 300.0)
        x[3:] = rng.uniform(-50.0, 150.0, 6)
        lam = rng.uniform(-5.0, 5.0, 9)
        u = rng.uniform(0.0, 1.0, 8)
        d = lo.adjoint_rhs(0.0, lam, x, u, P52)
        g = lo.control_gradient(x, lam, u, w)
        for i in range(9):
            eps = 1e-5 * max(1.0, abs(x[i]))
            xp, xm = x.copy(), x.copy()
            xp[i] += eps
            xm[i] -= eps
            fd = -(lo.hamiltonian(xp, lam, u, P52, w) - lo.hamiltonian(xm, lam, u, P52, w)) / (2 * eps)
            worst_adj = max(worst_adj, abs(d[i] - fd) / max(abs(fd), abs(d[i]), 1e-8))
        for j in range(8):
            eps = 1e-5 * max(1.0, abs(u[j]))
            up, um = u.copy(), u.copy()
            up[j] += eps
            um[j] -= eps
            fd = (lo.hamiltonian(x, lam, up, P52, w) - lo.hamiltonian(x, lam, um, P52, w)) / (2 * eps)
            worst_grad = max(worst_grad, abs(g[j] - fd) / max(abs(fd), abs(g[j]), 1e-8))
    check(
        "2 (adjoint and control gradients match finite differences)",
        worst_adj <= 1e-6 and worst_grad <= 1e-6,
        f"worst adjoint rel err {worst_adj:.2e}, worst gradient rel err {worst_grad:.2e}",
    )


def test_criterion_03_integrator_order():
    hs = np.array([0.2, 0.1, 0.05, 0.025])
    errs = []
    for h in hs:
        mesh = lo.TimeMesh(0.0, 1.0, round(1.0 / h))
        traj = lo.integrate_forward(lambda t, x, u, p: x, 1.0, None, mesh)
        errs.append(abs(traj.values[-1, 0] - math.e))
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    check("3 (RK4 observed order >= 3.9)", slope >= 3.9, f"observed order {slope:.3f}")


def test_criterion_04_uncontrolled_cytokine_trends(scenario_batch):
    _, reports, _ = scenario_batch
    trends = reports["none"].trends
    expected = {"IFNg": "-", "IL10": "-", "IL12": "-", "TNFa": "+", "IL15": "+", "IL17": "+"}
    ok = all(trends[k] == v for k, v in expected.items())
    check(
        "4 (uncontrolled cytokine trend signs)",
        ok,
        f"expected {expected}, computed {trends}",
    )


def test_criterion_05_optimizer_sanity(scenario_batch):
    cfg, reports, results = scenario_batch
    j_unc = reports["none"].cost
    problems = []
    for label, res in results.items():
        if not res.converged or res.iterations > 200:
            problems.append(f"{label}: converged={res.converged} after {res.iterations} it")
        if res.cost_history[-1] > j_unc * (1.0 + 1e-6):
            problems.append(f"{label}: J={res.cost_history[-1]:.4f} > uncontrolled {j_unc:.4f}")
        if not np.all(res.costate.values[-1] == 0.0):
            problems.append(f"{label}: costate terminal node not exactly zero")
        u = res.controls.values
        if u.min() < 0.0 or np.any(u > cfg.control_bounds):
            problems.append(f"{label}: controls leave their bounds")
    check("5 (optimizer sanity on all controlled scenarios)", not problems, "; ".join(problems))


def test_criterion_06_single_drug_ordering(scenario_batch):
    _, reports, _ = scenario_batch
    singles = [reports[s] for s in SINGLES]
    expected = ["clofazimine", "dapsone", "rifampin"]
    for metric in ("final_B", "final_I"):
        got = compare_scenarios(singles, metric)
        check(
            f"6 (single-drug ordering on {metric})",
            got == expected,
            f"expected {expected}, computed {got}",
        )


def test_criterion_07_two_drug_ordering_and_full_mdt(scenario_batch):
    _, reports, _ = scenario_batch
    pairs = [reports[s] for s in PAIRS]
    for metric in ("final_I", "final_B"):
        got = compare_scenarios(pairs, metric)
        check(
            f"7 (pair ordering on {metric})",
            got[0] == "dapsone+clofazimine" and got[-1] == "rifampin+dapsone",
            f"computed {got}",
        )
        key = {"final_I": lambda r: r.final_state[1], "final_B": lambda r: r.final_state[2]}[metric]
        mdt_val = key(reports[MDT])
        beats_all = all(mdt_val <= key(r) for r in pairs)
        check(
            f"7 (full MDT beats every pair on {metric})",
            beats_all,
            f"MDT {metric}={mdt_val:.6g} vs pairs "
            + ", ".join(f"{r.scenario}={key(r):.6g}" for r in pairs),
        )


def test_criterion_08_susceptible_cell_signs(scenario_batch):
    _, reports, _ = scenario_batch
    signs = susceptible_direction(list(reports.values()))
    expected = {
        "clofazimine": "+",
        "dapsone": "+",
        "rifampin": "-",
        "rifampin+dapsone": "-",
        MDT: "+",
    }
    mismatches = {k: (v, signs[k]) for k, v in expected.items() if signs[k] != v}
    check(
        "8 (susceptible-cell direction vs baseline)",
        not mismatches,
        f"expected vs computed: {mismatches}" if mismatches else "",
    )


def test_criterion_09_penalty_dominance(scenario_batch):
    _, reports, _ = scenario_batch
    cfg = OctlConfig(mesh=FULL_MESH, weights=lo.CostWeights(P=1e9, Q=1e9, R=1e9))
    res = fbsm_solve(X_SIM, P52, cfg)
    j_unc = reports["none"].cost
    sup = float(res.controls.values.max())
    rel = abs(res.cost_history[-1] - j_unc) / j_unc
    check(
        "9 (penalty dominance)",
        res.converged and sup < 1e-3 and rel < 1e-3,
        f"sup-norm {sup:.2e}, |J - J_unc|/J_unc = {rel:.2e}",
    )


def test_criterion_10_compare_determinism(tmp_path, monkeypatch):
    runs = {}
    for cap, sub in (("2", "a"), ("4", "b")):
        monkeypatch.setenv("LEPRA_OCTL_THREADS", cap)
        out = tmp_path / sub
        assert cli_main(["compare", "--out-dir", str(out)]) == 0
        runs[sub] = (out / "compare_summary.csv").read_bytes()
    check(
        "10 (byte-identical compare summaries across parallelism caps)",
        runs["a"] == runs["b"],
        f"{len(runs['a'])} bytes each",
    )
