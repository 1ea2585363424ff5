"""Tropical real hyperfield and the sign hyperfield.

Elements of the tropical real hyperfield are ordinary reals with the usual
product; the sum of two elements is a closed set:

    x + y = {x}            if |x| > |y| or x == y
    x + y = {y}            if |y| > |x|
    x + y = [-|x|, |x|]    if y == -x

The hyperaddition arises as the limit of the graphs of ordinary addition
conjugated by x -> x**(kappa**-m) for an odd rational 0 < kappa < 1;
:func:`deformed_add` and :func:`graph_grid` expose the finite stages.

Multivalued sums are returned as :class:`HyperSet` values.  Endpoints are kept
as :class:`fractions.Fraction` when all inputs are rational, so set identities
(associativity, distributivity) can be checked by exact equality.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Iterator, Sequence

from .errors import DomainError

Number = Fraction | float


def as_number(x) -> Number:
    """Coerce to Fraction when rational (int, Fraction, str), else float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not hyperfield elements")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, Real):
        return float(x)
    raise TypeError(f"not a real number: {x!r}")


def as_odd_rational(kappa) -> Fraction:
    """Validate kappa: positive rational < 1 with odd numerator and denominator."""
    k = Fraction(kappa) if not isinstance(kappa, Fraction) else kappa
    if not (0 < k < 1):
        raise DomainError(f"kappa must satisfy 0 < kappa < 1, got {k}")
    if k.numerator % 2 == 0 or k.denominator % 2 == 0:
        raise DomainError(f"kappa must be an odd rational (2-adic unit), got {k}")
    return k


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _iroot(n: int, k: int) -> int | None:
    """Exact k-th root of a non-negative integer, or None."""
    if n < 2:
        return n
    r = int(round(n ** (1.0 / k))) if n.bit_length() < 1000 else None
    if r is None:
        lo, hi = 0, 1 << (n.bit_length() // k + 1)
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if mid**k <= n:
                lo = mid
            else:
                hi = mid - 1
        r = lo
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**k == n:
            return c
    return None


def _exact_power(x: Fraction, lam: Fraction) -> Fraction | None:
    """|x|**lam as a Fraction when it is rational, else None."""
    p, q = lam.numerator, lam.denominator
    a = abs(x)
    num, den = _iroot(a.numerator, q), _iroot(a.denominator, q)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** p


def theta_lambda(lam, x) -> Number:
    """The automorphism x -> sign(x)|x|**lam of the hyperfield, lam > 0.

    Exact (a Fraction) whenever both arguments are rational and the power
    happens to be rational, e.g. ``theta_lambda(Fraction(1, 3), 27) == 3``.
    """
    lam_n, x_n = as_number(lam), as_number(x)
    if lam_n <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if x_n == 0:
        return x_n
    if isinstance(lam_n, Fraction) and isinstance(x_n, Fraction):
        exact = _exact_power(x_n, lam_n)
        if exact is not None:
            return _sign(x_n) * exact
    return _sign(x_n) * math.exp(float(lam_n) * _log_abs(x_n))


def _log_abs(x) -> float:
    if isinstance(x, Fraction):
        return math.log(abs(x.numerator)) - math.log(x.denominator)
    return math.log(abs(x))


def odd_power(x, r) -> float:
    """x**r for an odd rational r (numerator and denominator odd), via sign(x)|x|**r."""
    r = Fraction(r)
    if x < 0 and (r.numerator % 2 == 0 or r.denominator % 2 == 0):
        raise DomainError(f"{r} is not an odd rational; power of negative {x} undefined")
    return float(theta_lambda(abs(r), x)) if r > 0 else 1.0 / float(theta_lambda(-r, x))


# --------------------------------------------------------------------------
# HyperSet


@dataclass(frozen=True)
class HyperSet:
    """A finite union of disjoint closed intervals, sorted; points are [a, a]."""

    intervals: tuple[tuple[Number, Number], ...]

    def __init__(self, intervals: Iterable[Sequence] = ()):
        object.__setattr__(self, "intervals", _normalize(intervals))

    @classmethod
    def point(cls, x) -> "HyperSet":
        v = as_number(x)
        return cls([(v, v)])

    @classmethod
    def interval(cls, lo, hi) -> "HyperSet":
        lo, hi = as_number(lo), as_number(hi)
        if lo > hi:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        return cls([(lo, hi)])

    @classmethod
    def of(cls, *points) -> "HyperSet":
        return cls([(as_number(p), as_number(p)) for p in points])

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for iv in self.intervals for v in iv)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def is_point(self) -> bool:
        return len(self.intervals) == 1 and self.intervals[0][0] == self.intervals[0][1]

    def __contains__(self, x) -> bool:
        v = as_number(x)
        return any(lo <= v <= hi for lo, hi in self.intervals)

    def __iter__(self) -> Iterator[tuple[Number, Number]]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __or__(self, other: "HyperSet") -> "HyperSet":
        return HyperSet(self.intervals + other.intervals)

    def __neg__(self) -> "HyperSet":
        return HyperSet((-hi, -lo) for lo, hi in self.intervals)

    def __repr__(self) -> str:
        parts = []
        for lo, hi in self.intervals:
            parts.append(f"{{{lo}}}" if lo == hi else f"[{lo}, {hi}]")
        return "HyperSet(" + " U ".join(parts) + ")" if parts else "HyperSet(empty)"

    def to_json(self) -> dict:
        return {"intervals": [[_num_str(lo), _num_str(hi)] for lo, hi in self.intervals]}

    @classmethod
    def from_json(cls, data: dict) -> "HyperSet":
        return cls([(_parse_num(lo), _parse_num(hi)) for lo, hi in data["intervals"]])


def _num_str(v: Number) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return format(v, ".17g")


def _parse_num(s) -> Number:
    if isinstance(s, (int, float)) and not isinstance(s, bool):
        return as_number(s)
    s = str(s)
    try:
        return Fraction(s) if ("." not in s and "e" not in s.lower()) else float(s)
    except ValueError:
        return float(s)


def _normalize(intervals: Iterable[Sequence]) -> tuple[tuple[Number, Number], ...]:
    ivs = []
    for iv in intervals:
        lo, hi = as_number(iv[0]), as_number(iv[1])
        if lo > hi:
            raise DomainError(f"interval with lo > hi: [{lo}, {hi}]")
        ivs.append((lo, hi))
    ivs.sort(key=lambda t: (t[0], t[1]))
    merged: list[tuple[Number, Number]] = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            plo, phi = merged[-1]
            merged[-1] = (plo, max(phi, hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


# --------------------------------------------------------------------------
# hyperaddition


def hyper_add(a, b) -> HyperSet:
    a, b = as_number(a), as_number(b)
    if a == -b:
        m = abs(a)
        return HyperSet([(-m, m)])
    if abs(a) > abs(b) or a == b:
        return HyperSet.point(a)
    return HyperSet.point(b)


def _min_abs(lo, hi):
    if lo <= 0 <= hi:
        return lo - lo  # zero of the same numeric type
    return min(abs(lo), abs(hi))


def _interval_sum(i, j) -> list[tuple[Number, Number]]:
    # Closed form for the union of x + y over x in I, y in J:
    #   (1) points of I with |v| >= min|J|   (x dominates, or ties resolved below)
    #   (2) points of J with |v| >= min|I|
    #   (3) [-M, M] with M = max |t| over t in I & (-J)  (antidiagonal pairs)
    # Boundary points |v| == min|J| are covered: the y attaining the minimum is
    # either v itself (x == y case) or -v (antidiagonal case contains v).
    (a1, a2), (b1, b2) = i, j
    out: list[tuple[Number, Number]] = []
    for (lo, hi), m in (((a1, a2), _min_abs(b1, b2)), ((b1, b2), _min_abs(a1, a2))):
        if m == 0:
            out.append((lo, hi))
            continue
        if lo <= -m:
            out.append((lo, min(hi, -m)))
        if hi >= m:
            out.append((max(lo, m), hi))
    k_lo, k_hi = max(a1, -b2), min(a2, -b1)
    if k_lo <= k_hi:
        big = max(abs(k_lo), abs(k_hi))
        out.append((-big, big))
    return out


def hyper_add_sets(A: HyperSet, B: HyperSet) -> HyperSet:
    """Elementwise extension of the hyperaddition to HyperSets (closed form)."""
    A, B = _as_set(A), _as_set(B)
    pieces: list[tuple[Number, Number]] = []
    for i in A.intervals:
        for j in B.intervals:
            pieces.extend(_interval_sum(i, j))
    return HyperSet(pieces)


def _as_set(x) -> HyperSet:
    return x if isinstance(x, HyperSet) else HyperSet.point(x)


def hyper_mul(a, b):
    """Ordinary product; elementwise when either argument is a HyperSet."""
    if isinstance(a, HyperSet) or isinstance(b, HyperSet):
        A, B = _as_set(a), _as_set(b)
        out = []
        for a1, a2 in A.intervals:
            for b1, b2 in B.intervals:
                prods = (a1 * b1, a1 * b2, a2 * b1, a2 * b2)
                out.append((min(prods), max(prods)))
        return HyperSet(out)
    return as_number(a) * as_number(b)


def theta_lambda_set(lam, A: HyperSet) -> HyperSet:
    # theta_lambda is increasing, so it maps intervals to intervals endpointwise
    return HyperSet((theta_lambda(lam, lo), theta_lambda(lam, hi)) for lo, hi in A.intervals)


def naive_limit_add(x, y) -> Number:
    """Pointwise limit of the conjugated sums: dominant argument, 0 if y == -x.

    Single-valued but not associative.
    """
    x, y = as_number(x), as_number(y)
    if y == -x:
        return x - x
    return x if abs(x) > abs(y) or x == y else y


# --------------------------------------------------------------------------
# dequantization


def deformed_add(x, y, m: int, kappa) -> float:
    """(x**e + y**e)**(1/e) with e = kappa**-m, odd powers taken as sign(x)|x|**e.

    Evaluated in log space: with |a| >= |b| the dominant argument,
    result = sign(a)|a| * (1 + s*(|b|/|a|)**e)**(kappa**m), s = sign(a*b).
    """
    if m < 0:
        raise DomainError("m must be a non-negative integer")
    k = as_odd_rational(kappa)
    xv, yv = as_number(x), as_number(y)
    if m == 0:
        return float(xv + yv)
    a, b = (xv, yv) if abs(xv) >= abs(yv) else (yv, xv)
    if a == 0:
        return 0.0
    e = float(k) ** (-m)
    s = _sign(a) * _sign(b)
    if s == 0:
        return float(a)
    log_r = _log_abs(b) - _log_abs(a)
    t = math.exp(e * log_r) if log_r * e > -745.0 else 0.0
    if s < 0 and t >= 1.0:
        return 0.0
    inner = math.log1p(s * t)
    return _sign(a) * math.exp(_log_abs(a) + float(k) ** m * inner)


def graph_grid(m: int, kappa, x_range=(-2.0, 2.0), y_range=(-2.0, 2.0),
               resolution: int = 101) -> list[tuple[float, float, float]]:
    """Samples (x, y, deformed_add(x, y, m, kappa)) on a rectangular grid."""
    if resolution < 2:
        raise DomainError("resolution must be >= 2")
    as_odd_rational(kappa)
    xs = _linspace(*x_range, resolution)
    ys = _linspace(*y_range, resolution)
    return [(x, y, deformed_add(x, y, m, kappa)) for x in xs for y in ys]


def _linspace(lo, hi, n) -> list[float]:
    lo, hi = float(lo), float(hi)
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def grid_to_csv(rows: Iterable[tuple[float, float, float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "value"])
    for x, y, v in rows:
        w.writerow([format(x, ".17g"), format(y, ".17g"), format(v, ".17g")])
    return buf.getvalue()


# --------------------------------------------------------------------------
# perfection sequences


@dataclass(frozen=True)
class PerfectionSeq:
    """x = (x_n) with x_{n+1}**kappa == x_n, determined by x0."""

    x0: Number
    kappa: Fraction

    def __init__(self, x0, kappa):
        object.__setattr__(self, "x0", as_number(x0))
        object.__setattr__(self, "kappa", as_odd_rational(kappa))

    def term(self, n: int) -> Number:
        return theta_lambda(self.kappa ** (-n), self.x0)

    def terms(self, count: int) -> list[Number]:
        return [self.term(n) for n in range(count)]

    def check(self, count: int = 8, rtol: float = 1e-12) -> bool:
        """Applying the kappa-th power to term n+1 reproduces term n."""
        for n in range(count - 1):
            back = theta_lambda(self.kappa, self.term(n + 1))
            ref = self.term(n)
            if not math.isclose(float(back), float(ref), rel_tol=rtol, abs_tol=rtol):
                return False
        return True

    def __mul__(self, other: "PerfectionSeq") -> "PerfectionSeq":
        if other.kappa != self.kappa:
            raise DomainError("kappa mismatch")
        return PerfectionSeq(self.x0 * other.x0, self.kappa)


# --------------------------------------------------------------------------
# sign hyperfield and the compact subring


def sign_add(a: int, b: int) -> frozenset[int]:
    """Hyperaddition in the sign hyperfield {-1, 0, 1}."""
    if a not in (-1, 0, 1) or b not in (-1, 0, 1):
        raise DomainError("sign hyperfield elements are -1, 0, 1")
    if a == 0:
        return frozenset({b})
    if b == 0 or a == b:
        return frozenset({a})
    return frozenset({-1, 0, 1})


def sign_projection(x) -> int:
    """Residue map [-1, 1] -> {-1, 0, 1}: 0 on the open interval, +-1 at the ends."""
    v = as_number(x)
    if abs(v) > 1:
        raise DomainError(f"{x} is outside the compact subring [-1, 1]")
    return _sign(v) if abs(v) == 1 else 0


def in_compact_subring(x) -> bool:
    return abs(as_number(x)) <= 1
