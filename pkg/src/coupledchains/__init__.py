"""Exact inference and bound certification for coupled finite-alphabet chains.

A model is a finite-memory transition law for a stationary chain of pair
symbols (a hidden coordinate and an observed one).  The package computes
exact conditional distributions under arbitrary partial-observation patterns,
the extremal quantities governing how far the two coordinates' conditional
laws can drift apart, and certifies the corresponding comparison inequalities
by exhaustive enumeration, with a Monte Carlo simulator as an independent
oracle.
"""

from .errors import (
    AssumptionError,
    BudgetError,
    ConditioningError,
    ConvergenceError,
    CoupledChainsError,
    ModelStructureError,
    ParameterError,
)
from .model import (
    CoupledKernel,
    StationaryLaw,
    ValidationReport,
    build_channel_model,
    context_shift_matrix,
    load_model,
    model_hash,
    pack_context,
    pack_pair,
    random_model,
    save_model,
    stationary_law,
    unpack_context,
    unpack_pair,
    validate_kernel,
)
from .patterns import (
    ObservationPattern,
    Slot,
    format_pattern,
    free_past,
    pair_past,
    parse_pattern,
    x_past,
    y_past,
)
from .engine import (
    DEFAULT_BUDGET,
    ConditionalLaw,
    conditional_query,
    cylinder_probability,
    enumeration_cost,
    event_probability,
    filtered_symbol_law,
    forward_filter,
)
from .quantities import (
    Extremum,
    amplification,
    mismatch_floor_report,
    mismatch_rate,
    nonnullness,
    oscillation,
    oscillation_sum,
    quantity_report,
)
from .bounds import BoundCheck, SuiteReport, run_suite
from .simulate import (
    EmpiricalEstimate,
    Trajectory,
    empirical_conditional,
    export_trajectory,
    mc_vs_exact,
    sample_path,
)

__version__ = "0.1.0"
