"""Entropy-deformed addition on R_max and its bridge back to the W-model.

With rho = exp(hbar) the weight w(alpha) = rho**S(alpha) turns the sum

    x +_w y = (x**(1/hbar) + y**(1/hbar))**hbar

into a deformation of max.  Everything is evaluated in log space so that hbar
close to 0 stays stable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    return alpha


def entropy(alpha: float) -> float:
    """S(alpha) = -alpha log alpha - (1 - alpha) log(1 - alpha)."""
    a = _check_alpha(alpha)
    return -a * math.log(a) - (1 - a) * math.log1p(-a)


def w(alpha: float, hbar: float) -> float:
    if hbar < 0:
        raise DomainError("hbar must be >= 0")
    return math.exp(hbar * entropy(alpha))


def funeq_residual(alpha: float, beta: float, hbar: float) -> float:
    """w(a) w(b)**a - w(ab) w(g)**(1-ab), g = a(1-b)/(1-ab); vanishes identically."""
    a, b = _check_alpha(alpha), _check_alpha(beta)
    g = a * (1 - b) / (1 - a * b)
    lhs = w(a, hbar) * w(b, hbar) ** a
    rhs = w(a * b, hbar) * w(g, hbar) ** (1 - a * b)
    return lhs - rhs


@dataclass(frozen=True)
class DeformedScalar:
    """A positive value tagged with its deformation parameter."""

    value: float
    hbar: float

    def __post_init__(self):
        if not self.value > 0 or not self.hbar > 0:
            raise DomainError("DeformedScalar needs value > 0 and hbar > 0")

    def __add__(self, other: "DeformedScalar") -> "DeformedScalar":
        if other.hbar != self.hbar:
            raise DomainError("cannot add scalars with different hbar")
        return DeformedScalar(deformed_sum(self.value, other.value, self.hbar), self.hbar)

    def __mul__(self, other: "DeformedScalar") -> "DeformedScalar":
        if other.hbar != self.hbar:
            raise DomainError("cannot multiply scalars with different hbar")
        return DeformedScalar(self.value * other.value, self.hbar)


def deformed_log_sum(logs: Iterable[float], hbar: float) -> float:
    """log of the n-fold deformed sum of exp(logs): hbar * logsumexp(logs / hbar)."""
    if not hbar > 0:
        raise DomainError("hbar must be > 0")
    arr = np.asarray(list(logs), dtype=float)
    if arr.size == 0:
        raise DomainError("empty sum")
    return float(hbar * logsumexp(arr / hbar))


def deformed_sum(x: float, y: float, hbar: float) -> float:
    """(x**(1/hbar) + y**(1/hbar))**hbar for x, y > 0."""
    if not (x > 0 and y > 0):
        raise DomainError("deformed_sum needs positive arguments")
    return math.exp(deformed_log_sum((math.log(x), math.log(y)), hbar))


def deformed_sum_many(xs: Sequence[float], hbar: float) -> float:
    if any(not x > 0 for x in xs):
        raise DomainError("deformed sums need positive arguments")
    return math.exp(deformed_log_sum([math.log(x) for x in xs], hbar))


def chi(hbars: Sequence[float], values: Sequence[float]) -> np.ndarray:
    """chi(f)(hbar) = f(hbar)**(1/hbar) on a sample grid."""
    h = np.asarray(hbars, dtype=float)
    v = np.asarray(values, dtype=float)
    if h.shape != v.shape:
        raise DomainError("grid and values differ in shape")
    if np.any(v <= 0):
        raise DomainError("chi needs positive samples")
    if np.any(h <= 0):
        raise DomainError("chi needs hbar > 0")
    return np.exp(np.log(v) / h)


def lift_log(X, hbar: float) -> float:
    """log of the deformed sum of a_i**hbar * x_i, the lift of sum a_i [x_i] at hbar."""
    items = list(X.terms.items())
    if any(a <= 0 for _, a in items):
        raise DomainError("beta_map needs positive coefficients")
    if not items:
        raise DomainError("beta_map of the zero element")
    return deformed_log_sum([hbar * math.log(a) + g.log() for g, a in items], hbar)


def beta_map(X, z: float) -> float:
    """beta(f)(z) = chi(f)(1/z) = sum a_i x_i**z for positive coefficients."""
    if not z > 0:
        raise DomainError("beta_map is evaluated at z > 0")
    hbar = 1.0 / z
    return math.exp(lift_log(X, hbar) / hbar)
