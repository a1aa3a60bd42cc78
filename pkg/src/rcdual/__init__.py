"""Duality toolkit for reverse convex programs.

Minimize a convex ``f`` subject to finitely many reverse convex constraints
``h_t(x) > 0`` (or ``>= 0``) with convex ``h_t``.  The package builds the
conjugate-based dual, estimates primal and dual values on a grid, checks the
strict/non-strict equivalence, and reduces set constraints ``Tx not in int D``
to a single gauge constraint.
"""

from .errors import (
    BudgetExceeded,
    DimensionError,
    DomainError,
    EmptyPoolError,
    ExtendedRealError,
    NoClosedFormError,
    ProblemFormatError,
    RCDualError,
    ReductionNotApplicable,
    ValidationError,
)
from .extended import MINUS_INF, PLUS_INF, EValue
from .functions import (
    Affine,
    BoxIndicator,
    ConjugateResult,
    ConvexFunction,
    GaugeAffine,
    Norm,
    Quadratic,
    Scaled,
    Shifted,
    SqNorm2,
    conjugate_closed,
    conjugate_grid,
    evaluate,
    function_from_dict,
    minimize_unconstrained,
    subgrad,
)
from .problem import (
    Constraint,
    FeasibilityVerdict,
    Program,
    dump_program,
    feasibility,
    load_program,
    slater_point_search,
)

__version__ = "0.1.0"
