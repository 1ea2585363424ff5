"""Duhamel products and the embedding of measures into the Mikusinski field.

A measure mu on [0, inf) is sent to its distribution function
F(xi) = mu([0, xi]).  For exponential-polynomial measures F is again
piecewise exponential-polynomial, so a :class:`PrimitiveFn` stores it as
function data (pieces of a density-free :class:`ExpPolyMeasure`, read as a
function rather than a measure).  Under this map convolution of measures
becomes the Duhamel product F * G (t) = d/dt int_0^t F(u) G(t-u) du.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .measure_algebra import ExpPolyMeasure, Piece, _combine, convolve, iota

DEFAULT_SAMPLES = (0.3, 0.9, 1.7, 2.6, 4.1)


@dataclass(frozen=True)
class PrimitiveFn:
    """A right-continuous piecewise exponential-polynomial function on [0, inf).

    ``fn`` holds the function as the pieces of an atom-free ExpPolyMeasure
    (so the function value at t is ``fn.density(t)``).  ``measure`` is the
    measure it came from, when known.
    """

    fn: ExpPolyMeasure
    measure: ExpPolyMeasure | None = None

    def __post_init__(self):
        if self.fn.atoms:
            raise DomainError("function data cannot carry atoms")

    def __call__(self, t):
        out = self.fn.density(np.atleast_1d(np.asarray(t, dtype=float)))
        return out if np.ndim(t) else complex(out[0])

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimitiveFn) and self.fn == other.fn

    def __hash__(self):
        return hash(self.fn)

    def allclose(self, other: "PrimitiveFn", samples: Sequence[float] = DEFAULT_SAMPLES,
                 tol: float = 1e-8) -> bool:
        a, b = self(np.asarray(samples)), other(np.asarray(samples))
        return bool(np.all(np.abs(a - b) <= tol * np.maximum(1.0, np.abs(b))))

    def to_json(self) -> dict:
        return {"fn": self.fn.to_json()}


def primitive(mu: ExpPolyMeasure, strict: bool = False) -> PrimitiveFn:
    """F(xi) = mu([0, xi]), the density of iota * mu.

    With ``strict`` the measure must lie in B0 (atoms only at 0), which is the
    domain on which the embedding is a ring homomorphism.
    """
    if strict and any(x != 0.0 for x, _ in mu.atoms):
        raise DomainError("measure has atoms off 0; pass strict=False to embed it anyway")
    return PrimitiveFn(convolve(iota(), mu), mu)


def unit() -> PrimitiveFn:
    """The Duhamel unit, F = 1 (primitive of delta_0)."""
    return primitive(ExpPolyMeasure.atom(0.0, 1.0))


def identity_fn() -> PrimitiveFn:
    """I(xi) = xi (primitive of iota)."""
    return primitive(iota())


def _differentiate(fn: ExpPolyMeasure) -> ExpPolyMeasure:
    pieces = []
    for p in fn.pieces:
        terms = []
        for c, k, b in p.terms:
            if k:
                terms.append((c * k, k - 1, b))
            if b != 0:
                terms.append((-b * c, k, b))
        terms = _combine(terms)
        if terms:
            pieces.append(Piece(p.l, p.r, terms))
    return ExpPolyMeasure((), pieces)


def duhamel(F: PrimitiveFn, G: PrimitiveFn) -> PrimitiveFn:
    """F * G (t) = d/dt int_0^t F(u) G(t-u) du, in closed form.

    The inner integral is the convolution of F and G read as densities; it is
    continuous, and its piecewise derivative is the Duhamel product.
    """
    return PrimitiveFn(_differentiate(convolve(F.fn, G.fn)))


@dataclass(frozen=True)
class MikFraction:
    """num / den in the Mikusinski field; compared by cross multiplication."""

    num: PrimitiveFn
    den: PrimitiveFn

    def __post_init__(self):
        if not self.den.fn:
            raise DomainError("zero denominator")

    def equals(self, other: "MikFraction", samples: Sequence[float] = DEFAULT_SAMPLES,
               tol: float = 1e-8) -> bool:
        lhs = duhamel(self.num, other.den)
        rhs = duhamel(other.num, self.den)
        return lhs == rhs or lhs.allclose(rhs, samples, tol)

    def __mul__(self, other: "MikFraction") -> "MikFraction":
        return MikFraction(duhamel(self.num, other.num), duhamel(self.den, other.den))

    @classmethod
    def of(cls, F: PrimitiveFn) -> "MikFraction":
        return cls(F, unit())


def ffm_extend(mu: ExpPolyMeasure) -> MikFraction:
    """ffm(f) = ffm(iota f) / I; iota * mu always lies in B0."""
    return MikFraction(primitive(convolve(iota(), mu)), identity_fn())
