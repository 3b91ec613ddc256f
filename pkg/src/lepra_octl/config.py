"""Flat `key = value` run configuration with named presets.

Lines are `key = value` with `#` starting a comment; keys are the model
parameter names plus the namespaced settings listed in KNOWN_KEYS. A `preset`
line selects the parameter baseline (or names another config file to build
on); `initial_state` selects the starting compartment values; every other
line overrides one resolved setting. Preset resolution happens first, file
overrides second, regardless of line order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .integrate import TimeMesh
from .model import CONTROL_FIELDS, CostWeights, ModelParams, PARAM_FIELDS, STATE_FIELDS
from .octl import DrugMask, OctlConfig
from .presets import (
    DEFAULT_CONTROL_BOUNDS,
    HAZARD_RATIO_WEIGHTS,
    INITIAL_STATES,
    PARAM_PRESETS,
    initial_state_preset,
    params_preset,
)

ADJOINT_MODES = ("derived", "paper-verbatim")

_INIT_KEYS = tuple(f"init.{name}" for name in STATE_FIELDS)
_BOUND_KEYS = tuple(f"bounds.{name}" for name in CONTROL_FIELDS)
_MESH_KEYS = ("mesh.h", "mesh.T")
_OCTL_KEYS = ("octl.tolerance", "octl.max_iterations", "octl.theta_max")
_WEIGHT_KEYS = ("weights.P", "weights.Q", "weights.R")

KNOWN_KEYS = frozenset(
    ("preset", "initial_state", "adjoint")
    + PARAM_FIELDS
    + _INIT_KEYS
    + _MESH_KEYS
    + _OCTL_KEYS
    + _BOUND_KEYS
    + _WEIGHT_KEYS
)

DEFAULT_PRESET = "section-5-2"
DEFAULT_INITIAL_STATE = "simulation"


@dataclass(eq=False)
class RunConfig:
    """A fully resolved run setup: every numeric setting has a value."""

    params: ModelParams = PARAM_PRESETS[DEFAULT_PRESET]
    initial_state: np.ndarray = field(default_factory=lambda: INITIAL_STATES[DEFAULT_INITIAL_STATE].copy())
    mesh_h: float = 0.01
    mesh_T: float = 100.0
    tolerance: float = 1e-3
    max_iterations: int = 200
    theta_max: float = 1.0
    bounds: np.ndarray = field(default_factory=lambda: DEFAULT_CONTROL_BOUNDS.copy())
    weights: CostWeights = HAZARD_RATIO_WEIGHTS
    adjoint: str = "derived"
    preset_name: str = DEFAULT_PRESET
    initial_state_name: str = DEFAULT_INITIAL_STATE

    def __eq__(self, other) -> bool:
        if not isinstance(other, RunConfig):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.initial_state, other.initial_state)
            and self.mesh_h == other.mesh_h
            and self.mesh_T == other.mesh_T
            and self.tolerance == other.tolerance
            and self.max_iterations == other.max_iterations
            and self.theta_max == other.theta_max
            and np.array_equal(self.bounds, other.bounds)
            and self.weights == other.weights
            and self.adjoint == other.adjoint
        )

    def mesh(self) -> TimeMesh:
        n_steps = max(1, round(self.mesh_T / self.mesh_h))
        return TimeMesh(t0=0.0, T=self.mesh_T, n_steps=n_steps)

    def octl_config(self, mask: DrugMask | None = None) -> OctlConfig:
        return OctlConfig(
            mesh=self.mesh(),
            control_bounds=self.bounds.copy(),
            drug_mask=mask if mask is not None else DrugMask.full(),
            max_iterations=self.max_iterations,
            tolerance=self.tolerance,
            theta_max=self.theta_max,
            weights=self.weights,
            adjoint_verbatim=(self.adjoint == "paper-verbatim"),
        )


def _scan(text: str) -> list[tuple[int, str, str]]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("missing key before '='", line=lineno)
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", key=key, line=lineno)
        if not value:
            raise ConfigError("missing value", key=key, line=lineno)
        entries.append((lineno, key, value))
    return entries


def _as_float(key: str, value: str, lineno: int) -> float:
    try:
        out = float(value)
    except ValueError:
        raise ConfigError(f"expected a number, got {value!r}", key=key, line=lineno) from None
    if not math.isfinite(out):
        raise ConfigError("value must be finite", key=key, line=lineno)
    return out


def _as_int(key: str, value: str, lineno: int) -> int:
    f = _as_float(key, value, lineno)
    if f != int(f):
        raise ConfigError(f"expected an integer, got {value!r}", key=key, line=lineno)
    return int(f)


def parse_config(
    text: str,
    base_dir: str | Path | None = None,
    preset_override: str | None = None,
    default_preset: str = DEFAULT_PRESET,
    default_initial_state: str = DEFAULT_INITIAL_STATE,
    _depth: int = 0,
) -> RunConfig:
    """Resolve text into a RunConfig, applying presets before overrides."""
    if _depth > 8:
        raise ConfigError("preset files nest too deeply (cycle?)")
    entries = _scan(text)

    preset = preset_override
    state_name = None
    for lineno, key, value in entries:
        if key == "preset" and preset_override is None:
            preset = value
        elif key == "initial_state":
            state_name = value

    cfg = RunConfig()
    if preset is None:
        preset = default_preset
    if preset in PARAM_PRESETS:
        cfg = replace(cfg, params=params_preset(preset), preset_name=preset)
    else:
        path = Path(preset)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        if not path.is_file():
            raise ConfigError(
                f"not a preset name or readable file: {preset!r}", key="preset"
            )
        cfg = parse_config(
            path.read_text(),
            base_dir=path.parent,
            default_preset=default_preset,
            default_initial_state=default_initial_state,
            _depth=_depth + 1,
        )
        cfg = replace(cfg, preset_name=str(preset))

    if state_name is not None:
        if state_name not in INITIAL_STATES:
            raise ConfigError(
                f"unknown initial-state preset {state_name!r}", key="initial_state"
            )
        cfg = replace(cfg, initial_state=initial_state_preset(state_name),
                      initial_state_name=state_name)
    elif preset in PARAM_PRESETS:
        cfg = replace(cfg, initial_state=initial_state_preset(default_initial_state),
                      initial_state_name=default_initial_state)
    # a file-based preset keeps the initial state it resolved itself

    params_patch: dict[str, float] = {}
    init = cfg.initial_state.copy()
    bounds = cfg.bounds.copy()
    weights = {"P": cfg.weights.P, "Q": cfg.weights.Q, "R": cfg.weights.R}
    custom_init = False

    for lineno, key, value in entries:
        if key in ("preset", "initial_state"):
            continue
        if key == "adjoint":
            if value not in ADJOINT_MODES:
                raise ConfigError(
                    f"expected one of {ADJOINT_MODES}, got {value!r}", key=key, line=lineno
                )
            cfg = replace(cfg, adjoint=value)
        elif key in PARAM_FIELDS:
            v = _as_float(key, value, lineno)
            if v < 0.0:
                raise ConfigError("parameters must be nonnegative", key=key, line=lineno)
            params_patch[key] = v
        elif key.startswith("init."):
            init[STATE_FIELDS.index(key[5:])] = _as_float(key, value, lineno)
            custom_init = True
        elif key == "mesh.h":
            v = _as_float(key, value, lineno)
            if v <= 0.0:
                raise ConfigError("step size must be positive", key=key, line=lineno)
            cfg = replace(cfg, mesh_h=v)
        elif key == "mesh.T":
            v = _as_float(key, value, lineno)
            if v <= 0.0:
                raise ConfigError("horizon must be positive", key=key, line=lineno)
            cfg = replace(cfg, mesh_T=v)
        elif key == "octl.tolerance":
            v = _as_float(key, value, lineno)
            if v <= 0.0:
                raise ConfigError("tolerance must be positive", key=key, line=lineno)
            cfg = replace(cfg, tolerance=v)
        elif key == "octl.max_iterations":
            v = _as_int(key, value, lineno)
            if v < 1:
                raise ConfigError("max_iterations must be at least 1", key=key, line=lineno)
            cfg = replace(cfg, max_iterations=v)
        elif key == "octl.theta_max":
            v = _as_float(key, value, lineno)
            if v <= 0.0:
                raise ConfigError("theta_max must be positive", key=key, line=lineno)
            cfg = replace(cfg, theta_max=v)
        elif key.startswith("bounds."):
            v = _as_float(key, value, lineno)
            if v < 0.0:
                raise ConfigError("control bounds must be nonnegative", key=key, line=lineno)
            bounds[CONTROL_FIELDS.index(key[7:])] = v
        elif key.startswith("weights."):
            v = _as_float(key, value, lineno)
            if v < 0.0:
                raise ConfigError("cost weights must be nonnegative", key=key, line=lineno)
            weights[key[8:]] = v
        else:  # pragma: no cover - KNOWN_KEYS keeps this unreachable
            raise ConfigError("unhandled key", key=key, line=lineno)

    if params_patch:
        try:
            cfg = replace(cfg, params=cfg.params.with_overrides(**params_patch))
        except ValueError as err:
            raise ConfigError(str(err)) from None
    if custom_init:
        if not np.all(np.isfinite(init)):
            raise ConfigError("initial state must be finite", key="init")
        cfg = replace(cfg, initial_state=init, initial_state_name="custom")
    cfg = replace(cfg, bounds=bounds, weights=CostWeights(**weights))

    if round(cfg.mesh_T / cfg.mesh_h) < 1:
        raise ConfigError("mesh.T must cover at least one step of mesh.h", key="mesh.T")
    return cfg


def format_config(cfg: RunConfig) -> str:
    """Canonical echo of a resolved config; re-parses to an equal RunConfig."""
    lines = [
        "# resolved lepra-octl configuration",
        f"adjoint = {cfg.adjoint}",
    ]
    for name in PARAM_FIELDS:
        lines.append(f"{name} = {float(getattr(cfg.params, name))!r}")
    for k, name in enumerate(STATE_FIELDS):
        lines.append(f"init.{name} = {float(cfg.initial_state[k])!r}")
    lines.append(f"mesh.h = {cfg.mesh_h!r}")
    lines.append(f"mesh.T = {cfg.mesh_T!r}")
    lines.append(f"octl.tolerance = {cfg.tolerance!r}")
    lines.append(f"octl.max_iterations = {cfg.max_iterations}")
    lines.append(f"octl.theta_max = {cfg.theta_max!r}")
    for k, name in enumerate(CONTROL_FIELDS):
        lines.append(f"bounds.{name} = {float(cfg.bounds[k])!r}")
    lines.append(f"weights.P = {cfg.weights.P!r}")
    lines.append(f"weights.Q = {cfg.weights.Q!r}")
    lines.append(f"weights.R = {cfg.weights.R!r}")
    return "\n".join(lines) + "\n"
