"""CheapSVRG: variance-reduced SGD with a cheap surrogate of the full gradient."""

from ._core import (
    TRACE_HEADER,
    DataError,
    InfeasibleBudget,
    InfeasibleStep,
    NoConvergence,
    StudyResult,
    __version__,
    component_gradient,
    epochs_needed,
    estimate_constants,
    feasibility_check,
    full_gradient,
    generate,
    gradient_budget,
    kappa_basic,
    load_dataset,
    objective_value,
    plan_budget,
    read_traces,
    rho_basic,
    rho_coordinate,
    rho_minibatch,
    run,
    run_checks,
    run_study,
    sample_subset,
    spectral_extremes,
)

TRACE_COLUMNS = tuple(TRACE_HEADER.split(","))

__all__ = [name for name in dir() if not name.startswith("_")]
