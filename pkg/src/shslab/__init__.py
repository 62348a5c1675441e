"""shslab: a 1D solid-combustion simulation lab.

Integrates the stiff-kinetics temperature/reactant system, its
sharp-interface limit (heat flow with an irreversible burned-fraction
field), executable forms of the a-priori estimates relating the two,
and a scripted experiment harness (steepness sweeps, wave speed and
pulsation measurements, a negative-phase peak probe).
"""

__version__ = "0.1.0"

from .core import (
    Domain1D,
    GridMismatchError,
    ScalarField,
    TimeGrid,
    Trajectory,
    integrate,
    lp_space_time_distance,
)
from .kinetics import (
    MATKOWSKY_SIVASHINSKY,
    TABULATED,
    THRESHOLD,
    AssumptionReport,
    KineticsFamily,
    verify_assumption_cold,
    verify_assumption_hot,
)
from .shs import (
    NumericalFailureError,
    SHSState,
    default_dt,
    diffusion_substep,
    initial_state,
    reaction_substep,
    run_heat,
    run_shs,
)
from .stefan import (
    LimitState,
    apply_initial_jump,
    ignition_sweep,
    run_limit,
    run_limit_from_state,
    step_limit,
)

__all__ = [
    "__version__",
    "Domain1D",
    "GridMismatchError",
    "ScalarField",
    "TimeGrid",
    "Trajectory",
    "integrate",
    "lp_space_time_distance",
    "MATKOWSKY_SIVASHINSKY",
    "THRESHOLD",
    "TABULATED",
    "AssumptionReport",
    "KineticsFamily",
    "verify_assumption_cold",
    "verify_assumption_hot",
    "NumericalFailureError",
    "SHSState",
    "default_dt",
    "diffusion_substep",
    "initial_state",
    "reaction_substep",
    "run_heat",
    "run_shs",
    "LimitState",
    "apply_initial_jump",
    "ignition_sweep",
    "run_limit",
    "run_limit_from_state",
    "step_limit",
]
