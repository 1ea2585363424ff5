"""Archimedean period rings: tropical hyperfield arithmetic, the universal
W-model Q[R+*], Laplace transforms of exponential-polynomial measures and the
Mikusinski embedding."""

from .errors import (ArcPeriodsError, BasisMismatch, DivergentVariation, DomainError,
                     PrecisionExhausted)

__version__ = "0.1.0"

__all__ = [
    "ArcPeriodsError", "BasisMismatch", "DivergentVariation", "DomainError",
    "PrecisionExhausted", "__version__",
]
