"""Within-host leprosy/cytokine dynamics with multi-drug optimal control.

Numerical core for a nine-compartment infection model (susceptible and
infected Schwann cells, bacterial load, six cytokine concentrations) driven
by eight drug controls, solved by a forward-backward sweep with
Newton-gradient control updates, plus the parameter-sweep validation and
drug-regimen comparison tooling.

The hot kernels run on a compiled extension when available; set
LEPRA_OCTL_PURE_PY=1 to force the pure-Python fallback.
"""

from ._kernels import backend_name
from .errors import ConfigError, IntegrationError
from .integrate import TimeMesh, Trajectory, cost_integral, integrate_backward, integrate_forward
from .model import (
    CONTROL_FIELDS,
    CostWeights,
    ModelParams,
    PARAM_FIELDS,
    STATE_FIELDS,
    adjoint_rhs,
    clamp_controls,
    control_gradient,
    hamiltonian,
    rate_from_doubling_time,
    running_cost,
    state_rhs,
)
from .octl import DrugMask, OctlConfig, OctlResult, fbsm_solve, simulate
from .presets import (
    HAZARD_RATIO_WEIGHTS,
    PRESET_SECTION_5_2,
    PRESET_TABLE_1,
    initial_state_preset,
    params_preset,
)
from .scenarios import (
    STANDARD_MASKS,
    ScenarioReport,
    compare_scenarios,
    run_all_scenarios,
    run_scenario,
    susceptible_direction,
)
from .validate import DoublingSummary, HeatMatrix, SweepSpec, doubling_metric, heat_sweep

__version__ = "0.1.0"

__all__ = [
    "CONTROL_FIELDS",
    "ConfigError",
    "CostWeights",
    "DoublingSummary",
    "DrugMask",
    "HAZARD_RATIO_WEIGHTS",
    "HeatMatrix",
    "IntegrationError",
    "ModelParams",
    "OctlConfig",
    "OctlResult",
    "PARAM_FIELDS",
    "PRESET_SECTION_5_2",
    "PRESET_TABLE_1",
    "STANDARD_MASKS",
    "STATE_FIELDS",
    "ScenarioReport",
    "SweepSpec",
    "TimeMesh",
    "Trajectory",
    "adjoint_rhs",
    "backend_name",
    "clamp_controls",
    "compare_scenarios",
    "control_gradient",
    "cost_integral",
    "doubling_metric",
    "fbsm_solve",
    "hamiltonian",
    "heat_sweep",
    "initial_state_preset",
    "integrate_backward",
    "integrate_forward",
    "params_preset",
    "rate_from_doubling_time",
    "run_all_scenarios",
    "run_scenario",
    "running_cost",
    "simulate",
    "state_rhs",
    "susceptible_direction",
    "__version__",
]
