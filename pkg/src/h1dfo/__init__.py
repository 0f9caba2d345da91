"""Derivative-free optimization toolkit built on ball-seminorm quadratic models.

The package measures quadratics by the H1 seminorm over Euclidean balls
(closed form plus a quadrature cross-check), solves least-norm interpolation
problems, performs least-change model updates with geometric or balancing
choices of the ball, and wraps everything in a trust-region minimizer with a
permutation-replicated benchmarking harness.
"""

from ._kernels import BACKEND
from .bench import (
    ProfileCurve,
    RunRecord,
    StatSummary,
    performance_profile,
    profile_from_records,
    records_from_csv,
    records_to_csv,
    run_suite,
    summarize,
)
from .errors import (
    DimensionMismatchError,
    DuplicatePointsError,
    GeometryFailureError,
    InconsistentDataError,
    NotPoisedError,
)
from .interpolation import (
    InterpolationSet,
    LeastNormSpec,
    PoisednessReport,
    brute_force_least_norm,
    check_error_bounds,
    check_poisedness,
    lagrange_functions,
    lagrange_values,
    least_norm_interpolate,
    radius_to_sigma,
    seminorm_optimality_residual,
    sigma_to_radius,
)
from .problems import (
    PROBLEM_NAMES,
    Permutation,
    ProblemDef,
    get_problem,
    permute_problem,
    random_permutation,
)
from .quadratic import (
    Ball,
    QuadraticModel,
    combine,
    h1_inner_product,
    h1_seminorm_sq,
    h1_seminorm_sq_quadrature,
    unit_ball_volume,
    zero_model,
)
from .solver import (
    SOLVER_NAMES,
    SolverConfig,
    SolverReport,
    initial_point_set,
    geometry_step_point,
    minimize,
    select_replacement_point,
    sigma_rule_for,
    trust_region_step,
)
from .update import (
    SigmaRule,
    UpdateContext,
    eta_xi_sigma,
    geometric_sigma,
    least_change_update,
    pythagorean_residual,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Ball",
    "DimensionMismatchError",
    "DuplicatePointsError",
    "GeometryFailureError",
    "InconsistentDataError",
    "InterpolationSet",
    "LeastNormSpec",
    "NotPoisedError",
    "Permutation",
    "PoisednessReport",
    "ProblemDef",
    "ProfileCurve",
    "PROBLEM_NAMES",
    "QuadraticModel",
    "RunRecord",
    "SOLVER_NAMES",
    "SigmaRule",
    "SolverConfig",
    "SolverReport",
    "StatSummary",
    "UpdateContext",
    "brute_force_least_norm",
    "check_error_bounds",
    "check_poisedness",
    "combine",
    "eta_xi_sigma",
    "geometric_sigma",
    "geometry_step_point",
    "get_problem",
    "h1_inner_product",
    "h1_seminorm_sq",
    "h1_seminorm_sq_quadrature",
    "initial_point_set",
    "lagrange_functions",
    "lagrange_values",
    "least_change_update",
    "least_norm_interpolate",
    "minimize",
    "performance_profile",
    "permute_problem",
    "profile_from_records",
    "pythagorean_residual",
    "radius_to_sigma",
    "random_permutation",
    "records_from_csv",
    "records_to_csv",
    "run_suite",
    "select_replacement_point",
    "seminorm_optimality_residual",
    "sigma_rule_for",
    "sigma_to_radius",
    "summarize",
    "trust_region_step",
    "unit_ball_volume",
    "zero_model",
]
