"""Gauge (Henstock-Kurzweil) integration with interchange-of-limits checks.

The integrator drives gamma-fine tagged partitions directly, so it
absorbs integrands ordinary quadrature rejects: unbounded derivatives,
conditionally convergent oscillatory tails, null sets pinched away by a
custom gauge.  On top of it sit checkers for the three classic limit
interchanges (differentiation under the integral, iterated integrals,
series-integral swaps), a small expression language for the CLI, and a
corpus of named reference cases with frozen expected outcomes.
"""

from .extreal import (
    NEG_INF,
    POS_INF,
    ClosedInterval,
    DegenerateIntervalError,
    ExtReal,
    OpenInterval,
    ext,
)
from .gauge import (
    Gauge,
    enumeration_gauge,
    intersect_gauges,
    is_fine,
    rational_enumeration,
    singularity_gauge,
    uniform_gauge,
)
from .partition import (
    CellBudgetExceeded,
    DepthExceeded,
    EvaluatorDomainError,
    TaggedPartition,
    cousin_fine_partition,
    riemann_sum,
    validate,
)
from .integrator import (
    CauchyBranch,
    IntegralResult,
    IntegralStatus,
    IntegratorConfig,
    SumSpread,
    cauchy_closed_form,
    hake_improper,
    hk_integrate,
    hk_sum_spread,
    integrate_auto,
)
from .accel import aitken_sweep, series_limit, shanks_limit, window_oscillation
from .expr import (
    DomainError,
    NotDifferentiable,
    ParseError,
    UnboundVariable,
    compile_evaluator,
    differentiate,
    evaluate,
    parse,
    to_text,
    variables,
)
from .calculus import (
    FtcReport,
    HypothesisPreset,
    InterchangeReport,
    InterchangeVerdict,
    Rectangle,
    Window,
    default_windows,
    diff_under_integral,
    ftc_verify,
    interchange_iterated,
    interchange_sum_integral,
    numeric_derivative,
)
from .corpus import (
    CaseKind,
    CaseReport,
    Expected,
    NamedCase,
    Provenance,
    UnknownCase,
    get_case,
    list_cases,
    run_case,
)

__version__ = "0.1.0"

__all__ = [
    "NEG_INF",
    "POS_INF",
    "ClosedInterval",
    "DegenerateIntervalError",
    "ExtReal",
    "OpenInterval",
    "ext",
    "Gauge",
    "enumeration_gauge",
    "intersect_gauges",
    "is_fine",
    "rational_enumeration",
    "singularity_gauge",
    "uniform_gauge",
    "CellBudgetExceeded",
    "DepthExceeded",
    "EvaluatorDomainError",
    "TaggedPartition",
    "cousin_fine_partition",
    "riemann_sum",
    "validate",
    "CauchyBranch",
    "IntegralResult",
    "IntegralStatus",
    "IntegratorConfig",
    "SumSpread",
    "cauchy_closed_form",
    "hake_improper",
    "hk_integrate",
    "hk_sum_spread",
    "integrate_auto",
    "aitken_sweep",
    "series_limit",
    "shanks_limit",
    "window_oscillation",
    "DomainError",
    "NotDifferentiable",
    "ParseError",
    "UnboundVariable",
    "compile_evaluator",
    "differentiate",
    "evaluate",
    "parse",
    "to_text",
    "variables",
    "FtcReport",
    "HypothesisPreset",
    "InterchangeReport",
    "InterchangeVerdict",
    "Rectangle",
    "Window",
    "default_windows",
    "diff_under_integral",
    "ftc_verify",
    "interchange_iterated",
    "interchange_sum_integral",
    "numeric_derivative",
    "CaseKind",
    "CaseReport",
    "Expected",
    "NamedCase",
    "Provenance",
    "UnknownCase",
    "get_case",
    "list_cases",
    "run_case",
    "__version__",
]
