"""Command-line front end.

    lepra-octl simulate  [--config PATH] [--preset NAME] [--out-dir PATH]
    lepra-octl optimize  [--config PATH] [--preset NAME] [--out-dir PATH]
                         [--drugs rifampin,dapsone,clofazimine]
    lepra-octl heatmap   [--config PATH] [--preset NAME] [--out-dir PATH]
                         [--pair X,Y] [--grid-n N] [--range-x LO,HI] [--range-y LO,HI]
    lepra-octl compare   [--config PATH] [--preset NAME] [--out-dir PATH]

Every command writes CSV files (full-precision, round-trippable floats) plus
an echo of the resolved configuration into the output directory. On any
error the exit status is nonzero and partially written outputs are removed.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .config import RunConfig, format_config, parse_config
from .errors import ConfigError, IntegrationError
from .integrate import Trajectory
from .model import CONTROL_FIELDS, STATE_FIELDS
from .octl import DrugMask, fbsm_solve, simulate
from .presets import SWEEP_RANGES
from .scenarios import CYTOKINE_FIELDS, STANDARD_MASKS, run_all_scenarios
from .validate import SweepSpec, heat_sweep


def _fmt(x) -> str:
    return repr(float(x))


class _OutputSet:
    """Tracks files written by one command so failures can clean up."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.paths: list[Path] = []

    def target(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        p = self.out_dir / name
        self.paths.append(p)
        return p

    def discard(self) -> None:
        for p in self.paths:
            p.unlink(missing_ok=True)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _trajectory_rows(state: Trajectory, controls: Trajectory | None):
    times = state.times
    for k in range(state.mesh.n_nodes):
        row = [_fmt(times[k])] + [_fmt(v) for v in state.values[k]]
        if controls is not None:
            row += [_fmt(v) for v in controls.values[k]]
        yield row


def _write_trajectory(path: Path, state: Trajectory, controls: Trajectory | None) -> None:
    header = ["t"] + list(STATE_FIELDS)
    if controls is not None:
        header += list(CONTROL_FIELDS)
    _write_csv(path, header, _trajectory_rows(state, controls))


def _write_resolved(outputs: _OutputSet, cfg: RunConfig) -> None:
    outputs.target("resolved_config.cfg").write_text(format_config(cfg))


def _load_config(args, default_preset: str, default_initial_state: str) -> RunConfig:
    text = ""
    base_dir = None
    if args.config:
        path = Path(args.config)
        text = path.read_text()
        base_dir = path.parent
    return parse_config(
        text,
        base_dir=base_dir,
        preset_override=args.preset,
        default_preset=default_preset,
        default_initial_state=default_initial_state,
    )


def _cmd_simulate(args, outputs: _OutputSet) -> None:
    cfg = _load_config(args, "section-5-2", "simulation")
    state = simulate(cfg.initial_state, cfg.params, cfg.mesh())
    _write_trajectory(outputs.target("simulate_trajectory.csv"), state, None)
    _write_resolved(outputs, cfg)


def _cmd_optimize(args, outputs: _OutputSet) -> None:
    cfg = _load_config(args, "section-5-2", "simulation")
    mask = DrugMask.from_names(args.drugs.split(",")) if args.drugs else DrugMask.full()
    result = fbsm_solve(cfg.initial_state, cfg.params, cfg.octl_config(mask))
    _write_trajectory(outputs.target("optimize_state.csv"), result.state, None)
    _write_csv(
        outputs.target("optimize_controls.csv"),
        ["t"] + list(CONTROL_FIELDS),
        (
            [_fmt(t)] + [_fmt(v) for v in row]
            for t, row in zip(result.controls.times, result.controls.values)
        ),
    )
    _write_csv(
        outputs.target("optimize_cost_history.csv"),
        ["iteration", "J"],
        ([str(k), _fmt(j)] for k, j in enumerate(result.cost_history)),
    )
    _write_resolved(outputs, cfg)
    if not result.converged:
        print(
            f"warning: not converged within {cfg.max_iterations} iterations",
            file=sys.stderr,
        )


def _parse_range(text: str, flag: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{flag} expects LO,HI, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"{flag} expects two numbers, got {text!r}") from None
    return lo, hi


def _sweep_range(name: str, flag_value: str | None, flag: str) -> tuple[float, float]:
    if flag_value is not None:
        return _parse_range(flag_value, flag)
    if name in SWEEP_RANGES:
        return SWEEP_RANGES[name]
    raise ConfigError(
        f"no default sweep range for {name!r}; pass {flag} LO,HI", key=name
    )


def _cmd_heatmap(args, outputs: _OutputSet) -> None:
    cfg = _load_config(args, "table-1", "validation")
    pair = args.pair.split(",")
    if len(pair) != 2:
        raise ConfigError(f"--pair expects X,Y (abscissa,ordinate), got {args.pair!r}")
    px, py = pair[0].strip(), pair[1].strip()
    spec = SweepSpec(
        param_x=px,
        param_y=py,
        x_range=_sweep_range(px, args.range_x, "--range-x"),
        y_range=_sweep_range(py, args.range_y, "--range-y"),
        initial_state=cfg.initial_state,
        base_params=cfg.params,
        grid_n=args.grid_n,
    )
    matrix = heat_sweep(spec)

    stem = f"heatmap_{px}_{py}"
    csv_path = outputs.target(f"{stem}.csv")
    # gnuplot 'matrix nonuniform' layout: corner cell holds the column count,
    # row 0 the abscissa coordinates, column 0 the ordinate coordinates
    rows = [[str(spec.grid_n)] + [_fmt(x) for x in matrix.x_coords]]
    for i, yv in enumerate(matrix.y_coords):
        rows.append([_fmt(yv)] + [_fmt(v) for v in matrix.values[i]])
    with open(csv_path, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)

    gp_path = outputs.target(f"{stem}.gp")
    gp_path.write_text(
        "\n".join(
            [
                "set datafile separator ','",
                f"set xlabel '{px}'",
                f"set ylabel '{py}'",
                f"set title 'B at day {spec.observe_day:g}'",
                "set view map",
                f"plot '{csv_path.name}' matrix nonuniform with image notitle",
                "pause -1 'press return to close'",
            ]
        )
        + "\n"
    )
    _write_resolved(outputs, cfg)


def _cmd_compare(args, outputs: _OutputSet) -> None:
    cfg = _load_config(args, "section-5-2", "simulation")
    runs = run_all_scenarios(cfg.initial_state, cfg.params, cfg.octl_config(), STANDARD_MASKS)

    header = (
        ["scenario"]
        + [f"final_{name}" for name in STATE_FIELDS]
        + ["avg_I", "avg_B", "J", "converged", "iterations"]
        + [f"trend_{name}" for name in CYTOKINE_FIELDS]
    )
    rows = []
    for report, state, controls in runs:
        rows.append(
            [report.scenario]
            + [_fmt(v) for v in report.final_state]
            + [_fmt(report.avg_I), _fmt(report.avg_B), _fmt(report.cost)]
            + [str(report.converged).lower(), str(report.iterations)]
            + [report.trends[name] for name in CYTOKINE_FIELDS]
        )
        _write_trajectory(
            outputs.target(f"compare_{report.scenario.replace('+', '_')}_trajectory.csv"),
            state,
            controls,
        )
    _write_csv(outputs.target("compare_summary.csv"), header, rows)
    _write_resolved(outputs, cfg)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lepra-octl",
        description="Within-host leprosy model: simulation, optimal drug control, validation sweeps",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="path to a key = value configuration file")
        p.add_argument("--preset", help="parameter preset (section-5-2 | table-1 | config path)")
        p.add_argument("--out-dir", default=".", help="output directory (default: .)")

    p = sub.add_parser("simulate", help="uncontrolled forward simulation")
    common(p)
    p = sub.add_parser("optimize", help="solve the optimal-control problem")
    common(p)
    p.add_argument("--drugs", help="comma-separated active drugs (default: all three)")
    p = sub.add_parser("heatmap", help="two-parameter validation sweep")
    common(p)
    p.add_argument("--pair", default="alpha,gamma", help="abscissa,ordinate parameter names")
    p.add_argument("--grid-n", type=int, default=50, help="grid points per axis (default: 50)")
    p.add_argument("--range-x", help="abscissa range LO,HI (default: published range)")
    p.add_argument("--range-y", help="ordinate range LO,HI (default: published range)")
    p = sub.add_parser("compare", help="run and summarize the eight drug-mask scenarios")
    common(p)
    return parser


_COMMANDS = {
    "simulate": _cmd_simulate,
    "optimize": _cmd_optimize,
    "heatmap": _cmd_heatmap,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    outputs = _OutputSet(Path(args.out_dir))
    try:
        _COMMANDS[args.command](args, outputs)
    except (ConfigError, IntegrationError, ValueError, KeyError, OSError) as err:
        print(f"lepra-octl: error: {err}", file=sys.stderr)
        outputs.discard()
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
