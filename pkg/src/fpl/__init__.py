"""Certify contraction classes of self-maps on finite metric spaces."""

__version__ = "0.1.0"

from .classify import (  # noqa: E402
    Certificate,
    MappingClass,
    SelfMap,
    classify,
    classify_crr,
    classify_gen_crr,
    classify_gen_kannan,
    classify_perimeter,
)
from .lp import LPResult, solve_linear_feasibility  # noqa: E402
from .metric import (  # noqa: E402
    FiniteMetricSpace,
    ValidationReport,
    euclidean_space,
    metric_closure,
    validate_metric,
)

__all__ = [
    "Certificate",
    "FiniteMetricSpace",
    "LPResult",
    "MappingClass",
    "SelfMap",
    "ValidationReport",
    "classify",
    "classify_crr",
    "classify_gen_crr",
    "classify_gen_kannan",
    "classify_perimeter",
    "euclidean_space",
    "metric_closure",
    "solve_linear_feasibility",
    "validate_metric",
]
