"""Finite-horizon LQR under sparse disturbances.

Three policies for the same plant: a blind controller that ignores
disturbances, a disturbance-aware controller that knows the values of the
upcoming disturbances but only a probability model of their timing, and a
clairvoyant offline controller that knows both.  The library computes all
three, simulates them, and evaluates closed-form bounds on their cost gaps.
"""

from .lqr import (
    SystemModel,
    RiccatiData,
    validate_model,
    riccati_backward,
    stability_margin,
    p_hat_bound,
    ModelDimensionError,
    DefinitenessError,
    RiccatiNumericalError,
    TOL_PSD,
    TOL_PD,
    TOL_SYM,
)
from .disturbance import (
    DisturbanceScenario,
    ProbabilityModel,
    uniform_conditional,
    sample_scenario,
    remaining_count,
    certain_model,
    save_scenario,
    load_scenario,
)
from .policies import (
    OfflineAuxiliary,
    DisturbanceAwareTables,
    blind_action,
    offline_precompute,
    offline_action,
    offline_cost_to_go,
    da_precompute,
    da_action,
    da_expected_cost,
    values_reverse_chronological,
    SingularCostToGoError,
)
from .simulate import RolloutResult, RegretSample, rollout, empirical_regret
from .bounds import (
    BoundReport,
    theorem3_bound,
    theorem4_bound,
    theorem5_bound,
    compute_bound_report,
    verify_bounds,
    AssumptionViolatedError,
)
from .experiments import (
    ExperimentConfig,
    builtin_double_integrator,
    run_trajectory_experiment,
    run_sweep,
    run_convergence_diagnostics,
    run_bound_verification,
)

__version__ = "0.1.0"

__all__ = [
    "SystemModel", "RiccatiData", "validate_model", "riccati_backward",
    "stability_margin", "p_hat_bound", "ModelDimensionError",
    "DefinitenessError", "RiccatiNumericalError", "TOL_PSD", "TOL_PD",
    "TOL_SYM",
    "DisturbanceScenario", "ProbabilityModel", "uniform_conditional",
    "sample_scenario", "remaining_count", "certain_model", "save_scenario",
    "load_scenario",
    "OfflineAuxiliary", "DisturbanceAwareTables", "blind_action",
    "offline_precompute", "offline_action", "offline_cost_to_go",
    "da_precompute", "da_action", "da_expected_cost",
    "values_reverse_chronological", "SingularCostToGoError",
    "RolloutResult", "RegretSample", "rollout", "empirical_regret",
    "BoundReport", "theorem3_bound", "theorem4_bound", "theorem5_bound",
    "compute_bound_report", "verify_bounds", "AssumptionViolatedError",
    "ExperimentConfig", "builtin_double_integrator", "run_trajectory_experiment",
    "run_sweep", "run_convergence_diagnostics", "run_bound_verification",
    "__version__",
]
