"""Simulation of truncated discrete coagulation-fragmentation systems
with growth, decay and sedimentation.

The hot kernels run on a compiled extension when it is available and fall
back to pure NumPy otherwise; ``coagfrag.BACKEND`` names the active one.
"""

from ._backend import BACKEND
from .analysis import ConditionReport, NormSpec, check_conditions, delta_p, phi, weighted_norm
from .experiments import (
    BlockInitial,
    ConvergenceResult,
    ExplicitInitial,
    ScenarioConfig,
    builtin_example,
    convergence_study,
    initial_state,
    run_scenario,
)
from .integrator import (
    IntegrationError,
    SolverConfig,
    Trajectory,
    explicit_reference_step,
    integrate,
)
from .kernels import (
    CoagulationKernelSpec,
    FragmentationKernelSpec,
    RateLaws,
    coag_rate,
    frag_daughter,
    rate_table,
)
from .model import TruncatedSystem

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlockInitial",
    "CoagulationKernelSpec",
    "ConditionReport",
    "ConvergenceResult",
    "ExplicitInitial",
    "FragmentationKernelSpec",
    "IntegrationError",
    "NormSpec",
    "RateLaws",
    "ScenarioConfig",
    "SolverConfig",
    "Trajectory",
    "TruncatedSystem",
    "builtin_example",
    "check_conditions",
    "coag_rate",
    "convergence_study",
    "delta_p",
    "explicit_reference_step",
    "frag_daughter",
    "initial_state",
    "integrate",
    "phi",
    "rate_table",
    "run_scenario",
    "weighted_norm",
]
