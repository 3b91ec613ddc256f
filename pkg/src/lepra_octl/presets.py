"""Named parameter and initial-state presets.

Two parameter presets ship because the literature sources disagree:
`section-5-2` carries the values used for the 100-day drug-intervention
simulations, `table-1` the clinically compiled table used for the day-14
doubling validation. They differ in the cell/bacteria block (omega, beta,
gamma, mu1, alpha, y) and agree on the cytokine block.
"""

from __future__ import annotations

import numpy as np

from .model import CostWeights, ModelParams

_CYTOKINE_BLOCK = dict(
    alpha_Igamma=0.0003,
    delta_Igamma_Talpha=0.00554,
    delta_Igamma_I12=0.00903,
    delta_Igamma_I15=0.00625,
    delta_Igamma_I17=0.00499,
    mu_Igamma=2.16,
    beta_Talpha=0.004,
    mu_Talpha=1.112,
    alpha_I10=0.044,
    delta_I10_Igamma=0.00146,
    mu_I10=16.0,
    beta_I12=0.011,
    mu_I12=1.88,
    beta_I15=0.025,
    mu_I15=2.16,
    beta_I17=0.029,
    mu_I17=2.34,
    Q_Igamma=0.1,
    Q_Talpha=0.14,
    Q_I10=0.15,
    Q_I12=1.11,
    Q_I15=0.2,
    Q_I17=0.317,
)

PRESET_SECTION_5_2 = ModelParams(
    omega=20.9,
    beta=0.3,
    gamma=0.01795,
    mu1=0.00018,
    delta=0.2681,
    alpha=0.2,
    y=0.3,
    mu2=0.57,
    **_CYTOKINE_BLOCK,
)

PRESET_TABLE_1 = ModelParams(
    omega=0.0220,
    beta=3.4400,
    gamma=0.1795,
    mu1=0.0018,
    delta=0.2681,
    alpha=0.0630,
    y=0.0003,
    mu2=0.5700,
    **_CYTOKINE_BLOCK,
)

PARAM_PRESETS = {
    "section-5-2": PRESET_SECTION_5_2,
    "table-1": PRESET_TABLE_1,
}

# 100-day drug-intervention starting point
INITIAL_SIMULATION = np.array(
    [520.0, 275.0, 250.0, 50.0, 50.0, 75.0, 125.0, 125.0, 100.0]
)

# day-14 doubling-validation starting point (infection seeded by bacteria only)
INITIAL_VALIDATION = np.array(
    [5200.0, 0.0, 40.0, 5.0, 5.0, 15.0, 12.0, 12.0, 10.0]
)

INITIAL_STATES = {
    "simulation": INITIAL_SIMULATION,
    "validation": INITIAL_VALIDATION,
}

# weights proportional to the drugs' clinical hazard ratios
HAZARD_RATIO_WEIGHTS = CostWeights(P=1.0, Q=1.99, R=7.1)

# Per-control upper limits. The two controls that subtract from the bacterial
# replication rate (D23, D33) are capped at that rate's section-5-2 value:
# any larger and an aggressive iterate can push B negative, which the linear
# cost rewards and which the -beta*S*B coupling then turns into a finite-time
# blowup of S. The remaining controls only ever add clearance, so 1.0 is safe.
DEFAULT_CONTROL_BOUNDS = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 0.2, 1.0, 0.2])

# published sweep ranges for the doubling validation
SWEEP_RANGES = {
    "alpha": (0.0563, 0.0763),
    "gamma": (0.15, 0.2090),
    "y": (0.0002, 0.5003),
}


def params_preset(name: str) -> ModelParams:
    try:
        return PARAM_PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown parameter preset {name!r}; expected one of {sorted(PARAM_PRESETS)}"
        ) from None


def initial_state_preset(name: str) -> np.ndarray:
    try:
        return INITIAL_STATES[name].copy()
    except KeyError:
        raise KeyError(
            f"unknown initial-state preset {name!r}; expected one of {sorted(INITIAL_STATES)}"
        ) from None
