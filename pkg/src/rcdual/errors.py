"""Exception hierarchy."""


class RCDualError(Exception):
    """Base class for all package errors."""


class ExtendedRealError(RCDualError, ArithmeticError):
    """Undefined extended-real operation, e.g. ``+inf + -inf``."""


class DimensionError(RCDualError, ValueError):
    pass


class DomainError(RCDualError, ValueError):
    """A point lies outside the effective domain of a function."""


class NoClosedFormError(RCDualError, NotImplementedError):
    """No closed-form conjugate; use :func:`rcdual.functions.conjugate_grid`."""


class ValidationError(RCDualError, ValueError):
    pass


class ProblemFormatError(RCDualError, ValueError):
    pass


class BudgetExceeded(RCDualError, ValueError):
    pass


class EmptyPoolError(RCDualError):
    pass


class ReductionNotApplicable(RCDualError):
    """The anchor point already solves the set-constrained problem."""
