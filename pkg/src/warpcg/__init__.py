"""warpcg: matrix-free conjugate-gradient ascent on warped graph manifolds.

The optimizer lifts a smooth objective onto its graph, warps the metric
there by the gradient magnitude, and runs conjugate-gradient ascent with a
cubic geodesic retraction and secant vector transport. Every geometric
operation is O(dim) per call; the only objective access is values,
gradients, and Hessian-vector products.
"""

__version__ = "0.1.0"

from .baseline import run_euclidean_cg
from .errors import (
    DegenerateBeta,
    DegenerateStep,
    LineSearchFail,
    NonAscent,
    NumericalBreakdown,
    PsiDegenerate,
    StepUnstable,
    WarpcgError,
)
from .geometry import (
    GeodesicAcceleration,
    GeodesicJet,
    GeometryCache,
    WarpConfig,
    build_cache,
    geodesic_acceleration,
    inverse_metric_apply,
    metric_inner,
    metric_norm,
    normal_vector,
    project_to_tangent,
    riemannian_gradient,
    second_fundamental_form,
    taylor_coefficients,
)
from .linesearch import WolfeResult, strong_wolfe
from .objective import (
    CountingObjective,
    DEFAULT_FD_STEP,
    FdConfig,
    NegatedObjective,
    Objective,
)
from .problems import (
    QuadraticProblem,
    RosenbrockProblem,
    SquiggleProblem,
    classify_rosenbrock_basin,
    initial_point,
    make_problem,
)
from .rcg import IterationTrace, RcgConfig, RcgResult, StopReason, dy_beta, run_rcg
from .retraction import (
    TransportResult,
    curve_velocity,
    directional_value_and_slope,
    retract,
    vector_transport,
)

__all__ = [
    "__version__",
    "WarpcgError",
    "NumericalBreakdown",
    "PsiDegenerate",
    "DegenerateStep",
    "DegenerateBeta",
    "NonAscent",
    "LineSearchFail",
    "StepUnstable",
    "Objective",
    "FdConfig",
    "DEFAULT_FD_STEP",
    "NegatedObjective",
    "CountingObjective",
    "WarpConfig",
    "GeometryCache",
    "GeodesicAcceleration",
    "GeodesicJet",
    "build_cache",
    "metric_inner",
    "metric_norm",
    "inverse_metric_apply",
    "riemannian_gradient",
    "normal_vector",
    "project_to_tangent",
    "second_fundamental_form",
    "geodesic_acceleration",
    "taylor_coefficients",
    "retract",
    "curve_velocity",
    "directional_value_and_slope",
    "TransportResult",
    "vector_transport",
    "WolfeResult",
    "strong_wolfe",
    "StopReason",
    "RcgConfig",
    "IterationTrace",
    "RcgResult",
    "dy_beta",
    "run_rcg",
    "run_euclidean_cg",
    "SquiggleProblem",
    "RosenbrockProblem",
    "QuadraticProblem",
    "make_problem",
    "initial_point",
    "classify_rosenbrock_basin",
]
