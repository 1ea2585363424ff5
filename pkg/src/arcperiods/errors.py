"""Exception types shared by all modules.

The CLI maps ``DomainError`` to exit code 2 and ``PrecisionExhausted`` to 3.
"""


class ArcPeriodsError(Exception):
    pass


class DomainError(ArcPeriodsError, ValueError):
    """Input outside the domain of an operation."""


class PrecisionExhausted(ArcPeriodsError, ArithmeticError):
    """Two quantities could not be separated at the configured precision."""


class BasisMismatch(DomainError):
    pass


class DivergentVariation(DomainError):
    """Total variation is infinite (measure not finite)."""
