"""The rational group ring Q[R+*] as the universal W-model of the tropical reals.

A :class:`WittElement` is a finite sum ``sum a_i [x_i]`` with rational
coefficients and positive group elements ``x_i``; ``[-x] = -[x]`` folds signs
into the coefficients.  On top of the ring arithmetic the module provides

* ``rho_w``: the residue map to the hyperfield (dominant term),
* ``theta``: the evaluation homomorphism ``sum a_i x_i``,
* ``phi_eval``: ``z -> sum a_i x_i**z`` (ratios for fractions),
* ``frobenius``: ``[x] -> [x**lam]``,
* entropy symbols ``s(x) = 1 - [x] - [1-x]`` and the linear forms that detect
  them (``t_ell_jet``, ``delta_psi``, ``period_matrix``),
* the derivation ``n -> [n] - n`` on integers.

Group elements
--------------
A :class:`GroupElement` is stored canonically as a positive rational times
fractional powers of primes times rational powers of *numeric generators*
(arbitrary positive reals assumed multiplicatively independent of everything
else).  Equality is structural.  Comparison of two elements is exact unless a
numeric generator is involved, in which case it is done with mpmath at the
configured precision and raises :class:`PrecisionExhausted` on a near tie.
"""
from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

import mpmath
import sympy

from .errors import BasisMismatch, DomainError, PrecisionExhausted

PRECISION = 50


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, str, float)):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"cannot convert {x!r} to a rational")


def _factor(q: Fraction) -> dict[int, int]:
    """Prime exponents of a positive rational."""
    out: dict[int, int] = {}
    for p, e in sympy.factorint(q.numerator).items():
        out[int(p)] = out.get(int(p), 0) + int(e)
    for p, e in sympy.factorint(q.denominator).items():
        out[int(p)] = out.get(int(p), 0) - int(e)
    return {p: e for p, e in out.items() if e}


@dataclass(frozen=True, order=True)
class NumericGenerator:
    """A positive real admitted as an independent generator (numeric backend)."""

    label: str
    value: str = field(compare=False)

    def mp_log(self, dps: int = PRECISION):
        with mpmath.workdps(dps + 10):
            return mpmath.log(mpmath.mpf(self.value))


class GroupElement:
    """Signed element of R* = R+* x {+-1} (sign 0 encodes the hyperfield zero)."""

    __slots__ = ("rational", "radicals", "numeric", "sign", "_hash")

    def __init__(self, rational: Fraction = Fraction(1),
                 radicals: Mapping[int, Fraction] | None = None,
                 numeric: Mapping[NumericGenerator, Fraction] | None = None,
                 sign: int = 1):
        if sign == 0:
            rational, radicals, numeric = Fraction(1), None, None
        if rational <= 0:
            raise DomainError("rational part must be positive")
        rad: dict[int, Fraction] = {}
        for p, e in (radicals or {}).items():
            e = _frac(e)
            whole = e.numerator // e.denominator
            if whole:
                rational *= Fraction(p) ** whole
            frac = e - whole
            if frac:
                rad[int(p)] = frac
        num = {g: _frac(e) for g, e in (numeric or {}).items() if e}
        self.rational = rational
        self.radicals = tuple(sorted(rad.items()))
        self.numeric = tuple(sorted(num.items()))
        self.sign = int(sign)
        self._hash = hash((self.rational, self.radicals, self.numeric, self.sign))

    # -- construction ----------------------------------------------------
    @classmethod
    def of(cls, x) -> "GroupElement":
        if isinstance(x, GroupElement):
            return x
        if isinstance(x, mpmath.mpf):
            return cls.generator(x)
        q = _frac(x)
        if q == 0:
            return cls(sign=0)
        return cls(abs(q), sign=1 if q > 0 else -1)

    @classmethod
    def generator(cls, value, label: str | None = None, dps: int = PRECISION) -> "GroupElement":
        """Admit an arbitrary positive real as a fresh independent generator."""
        with mpmath.workdps(dps):
            v = mpmath.mpf(value)
            if v == 0:
                return cls(sign=0)
            sgn = 1 if v > 0 else -1
            text = mpmath.nstr(abs(v), dps)
        gen = NumericGenerator(label or text, text)
        return cls(numeric={gen: Fraction(1)}, sign=sgn)

    @classmethod
    def zero(cls) -> "GroupElement":
        return cls(sign=0)

    # -- structure -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            try:
                other = GroupElement.of(other)
            except (TypeError, ValueError):
                return NotImplemented
        return (self.sign, self.rational, self.radicals, self.numeric) == (
            other.sign, other.rational, other.radicals, other.numeric)

    def __hash__(self) -> int:
        return self._hash

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    @property
    def is_rational(self) -> bool:
        return not self.radicals and not self.numeric

    def __abs__(self) -> "GroupElement":
        if self.sign >= 0:
            return self
        return GroupElement(self.rational, dict(self.radicals), dict(self.numeric), 1)

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.rational, dict(self.radicals), dict(self.numeric), -self.sign)

    def __mul__(self, other) -> "GroupElement":
        other = GroupElement.of(other)
        if self.is_zero or other.is_zero:
            return GroupElement.zero()
        rad = dict(self.radicals)
        for p, e in other.radicals:
            rad[p] = rad.get(p, 0) + e
        num = dict(self.numeric)
        for g, e in other.numeric:
            num[g] = num.get(g, 0) + e
        return GroupElement(self.rational * other.rational, rad, num, self.sign * other.sign)

    __rmul__ = __mul__

    def inverse(self) -> "GroupElement":
        if self.is_zero:
            raise ZeroDivisionError("zero has no inverse")
        return GroupElement(1 / self.rational, {p: -e for p, e in self.radicals},
                            {g: -e for g, e in self.numeric}, self.sign)

    def __truediv__(self, other) -> "GroupElement":
        return self * GroupElement.of(other).inverse()

    def power_abs(self, lam) -> "GroupElement":
        """|x|**lam for rational lam (positive part only)."""
        lam = _frac(lam)
        if self.is_zero:
            if lam <= 0:
                raise ZeroDivisionError("0 to a non-positive power")
            return self
        if lam.denominator == 1:
            n = lam.numerator
            return GroupElement(self.rational ** n, {p: e * n for p, e in self.radicals},
                                {g: e * n for g, e in self.numeric}, 1)
        rad: dict[int, Fraction] = {p: Fraction(e) for p, e in _factor(self.rational).items()}
        for p, e in self.radicals:
            rad[p] = rad.get(p, 0) + e
        return GroupElement(Fraction(1), {p: e * lam for p, e in rad.items()},
                            {g: e * lam for g, e in self.numeric}, 1)

    def theta_power(self, lam) -> "GroupElement":
        """sign(x)|x|**lam, the hyperfield automorphism applied to this element."""
        return GroupElement.of(self.sign) * self.power_abs(lam) if not self.is_zero else self

    def prime_exponents(self) -> dict[int, Fraction]:
        out = {p: Fraction(e) for p, e in _factor(self.rational).items()}
        for p, e in self.radicals:
            out[p] = out.get(p, 0) + e
        return {p: e for p, e in out.items() if e}

    # -- values ----------------------------------------------------------
    def log(self) -> float:
        """log |x| as a float."""
        if self.is_zero:
            return -math.inf
        v = math.log(self.rational.numerator) - math.log(self.rational.denominator)
        v += sum(float(e) * math.log(p) for p, e in self.radicals)
        v += sum(float(e) * float(g.mp_log(20)) for g, e in self.numeric)
        return v

    def mp_log(self, dps: int = PRECISION):
        with mpmath.workdps(dps + 10):
            v = mpmath.log(self.rational.numerator) - mpmath.log(self.rational.denominator)
            for p, e in self.radicals:
                v += mpmath.mpf(e.numerator) / e.denominator * mpmath.log(p)
            for g, e in self.numeric:
                v += mpmath.mpf(e.numerator) / e.denominator * g.mp_log(dps)
            return v

    def mp_value(self, dps: int = PRECISION):
        if self.is_zero:
            return mpmath.mpf(0)
        with mpmath.workdps(dps + 10):
            return self.sign * mpmath.exp(self.mp_log(dps))

    def value(self) -> Fraction | float:
        """Exact Fraction when rational, float otherwise."""
        if self.is_zero:
            return Fraction(0)
        if self.is_rational:
            return self.sign * self.rational
        return self.sign * math.exp(self.log())

    def __float__(self) -> float:
        return float(self.value())

    def __repr__(self) -> str:
        if self.is_zero:
            return "0"
        parts = [] if (self.rational == 1 and (self.radicals or self.numeric)) else [str(self.rational)]
        parts += [f"{p}^({e})" for p, e in self.radicals]
        parts += [f"{g.label}^({e})" if e != 1 else g.label for g, e in self.numeric]
        body = "*".join(parts)
        return ("-" if self.sign < 0 else "") + body


def compare_abs(x: GroupElement, y: GroupElement, dps: int = PRECISION) -> int:
    """Sign of |x| - |y|; exact unless numeric generators survive in |x|/|y|."""
    if x.is_zero or y.is_zero:
        return (not x.is_zero) - (not y.is_zero)
    q = abs(x) / abs(y)
    if q.numeric:
        with mpmath.workdps(dps + 10):
            lg = q.mp_log(dps)
            if abs(lg) < mpmath.mpf(10) ** (-dps + 5):
                raise PrecisionExhausted(
                    f"cannot separate {x!r} and {y!r} at {dps} digits")
            return 1 if lg > 0 else -1
    if not q.radicals:
        return (q.rational > 1) - (q.rational < 1)
    d = math.lcm(*(e.denominator for _, e in q.radicals))
    power = q.rational ** d
    for p, e in q.radicals:
        power *= Fraction(p) ** (e * d).numerator
    return (power > 1) - (power < 1)


# --------------------------------------------------------------------------
# generator bases and linear functionals


def _rank(rows: list[list[Fraction]]) -> int:
    m = [list(r) for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _solve(cols: list[list[Fraction]], target: list[Fraction]) -> list[Fraction] | None:
    """Solve sum_j c_j cols[j] == target exactly; None when inconsistent."""
    k, n = len(cols), len(target)
    aug = [[cols[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    row, pivots = 0, []
    for c in range(k):
        piv = next((i for i in range(row, n) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][c]
        aug[row] = [a / pv for a in aug[row]]
        for i in range(n):
            if i != row and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[row])]
        pivots.append(c)
        row += 1
    if any(aug[i][k] != 0 for i in range(row, n)):
        return None
    sol = [Fraction(0)] * k
    for i, c in enumerate(pivots):
        sol[c] = aug[i][k]
    return sol


class GeneratorBasis:
    """Declared multiplicatively independent positive generators g_1..g_k.

    Rational (or radical) generators are checked for independence through
    their prime exponent vectors; numeric generators are independent by
    assumption.
    """

    def __init__(self, gens: Sequence, precision: int = PRECISION):
        elems = [GroupElement.of(g) for g in gens]
        if any(g.sign != 1 for g in elems):
            raise DomainError("generators must be positive")
        self.gens = tuple(elems)
        self.precision = precision
        exact = [g for g in elems if not g.numeric]
        primes = sorted({p for g in exact for p in g.prime_exponents()})
        self._primes = primes
        self._vectors = [self._vector(g) for g in elems]
        if exact:
            rows = [[g.prime_exponents().get(p, Fraction(0)) for p in primes] for g in exact]
            if not primes or _rank(rows) < len(exact):
                raise DomainError(f"generators {list(gens)} are not multiplicatively independent")
        nums = [g for g in elems if g.numeric]
        if len({g.numeric for g in nums}) < len(nums) or any(g.radicals or g.rational != 1 for g in nums):
            raise DomainError("numeric generators must be distinct bare generators")

    def _vector(self, g: GroupElement):
        pe = g.prime_exponents()
        return pe, dict(g.numeric)

    def __len__(self) -> int:
        return len(self.gens)

    def __eq__(self, other) -> bool:
        return isinstance(other, GeneratorBasis) and self.gens == other.gens

    def __hash__(self) -> int:
        return hash(self.gens)

    def __repr__(self) -> str:
        return f"GeneratorBasis({list(self.gens)!r})"

    def element(self, exponents: Sequence) -> GroupElement:
        if len(exponents) != len(self.gens):
            raise BasisMismatch("exponent vector length differs from basis size")
        out = GroupElement()
        for g, e in zip(self.gens, exponents):
            e = _frac(e)
            if e:
                out = out * g.power_abs(e)
        return out

    def coordinates(self, g: GroupElement) -> list[Fraction]:
        """Exponent vector of |g| over the basis; BasisMismatch if not in the span."""
        g = abs(GroupElement.of(g))
        pe = g.prime_exponents()
        atoms = sorted(set(pe) | set(self._primes))
        numeric_atoms = sorted({a for _, nd in self._vectors for a in nd} | {a for a, _ in g.numeric})
        cols = [[v[0].get(p, Fraction(0)) for p in atoms] + [v[1].get(a, Fraction(0)) for a in numeric_atoms]
                for v in self._vectors]
        num = dict(g.numeric)
        target = [pe.get(p, Fraction(0)) for p in atoms] + [num.get(a, Fraction(0)) for a in numeric_atoms]
        if not cols:
            if any(target):
                raise BasisMismatch(f"{g!r} is not in the span of an empty basis")
            return []
        sol = _solve(cols, target)
        if sol is None:
            raise BasisMismatch(f"{g!r} is not in the subgroup generated by {self!r}")
        return sol


def prime_basis(primes: Iterable[int]) -> GeneratorBasis:
    return GeneratorBasis([Fraction(p) for p in primes])


class EllFunctional:
    """A group homomorphism l: R+* -> R, l(xy) = l(x) + l(y).

    Either prescribed on a generator basis (finitely supported, exact when the
    values are rational) or the logarithm.
    """

    def __init__(self, basis: GeneratorBasis | None, values: Sequence | None = None,
                 *, _log: bool = False):
        self.basis = basis
        self.is_log = _log
        if not _log:
            if basis is None or values is None or len(values) != len(basis):
                raise DomainError("one value per basis generator is required")
            self.values = tuple(_frac(v) if not isinstance(v, float) else v for v in values)
        else:
            self.values = ()

    @classmethod
    def log(cls) -> "EllFunctional":
        return cls(None, _log=True)

    @classmethod
    def dual(cls, basis: GeneratorBasis, index: int, scale=1) -> "EllFunctional":
        vals = [Fraction(0)] * len(basis)
        vals[index] = _frac(scale)
        return cls(basis, vals)

    def __call__(self, g) -> Fraction | float:
        g = GroupElement.of(g)
        if self.is_log:
            return g.log()
        coords = self.basis.coordinates(g)
        return sum((c * v for c, v in zip(coords, self.values)), Fraction(0))

    def __repr__(self) -> str:
        return "EllFunctional.log()" if self.is_log else f"EllFunctional({self.basis!r}, {list(self.values)})"


# --------------------------------------------------------------------------
# Witt elements


class WittElement:
    """Finite Q-linear combination of positive group elements."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        acc: dict[GroupElement, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for g, a in items:
            g = GroupElement.of(g)
            a = _frac(a)
            if g.is_zero or a == 0:
                continue
            if g.sign < 0:
                g, a = abs(g), -a
            acc[g] = acc.get(g, Fraction(0)) + a
        self.terms: dict[GroupElement, Fraction] = {g: a for g, a in acc.items() if a != 0}

    @classmethod
    def zero(cls) -> "WittElement":
        return cls()

    @classmethod
    def one(cls) -> "WittElement":
        return cls({GroupElement(): Fraction(1)})

    @classmethod
    def scalar(cls, q) -> "WittElement":
        """The rational q viewed in the ring, i.e. q*[1]."""
        return cls({GroupElement(): _frac(q)})

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = WittElement.scalar(other)
        return isinstance(other, WittElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def _coerce(self, other) -> "WittElement":
        if isinstance(other, WittElement):
            return other
        if isinstance(other, (int, Fraction)):
            return WittElement.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return WittElement(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "WittElement":
        return WittElement({g: -a for g, a in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: list[tuple[GroupElement, Fraction]] = []
        for g, a in self.terms.items():
            for h, b in other.terms.items():
                out.append((g * h, a * b))
        return WittElement(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "WittElement":
        if n < 0:
            raise DomainError("negative powers live in WittFraction")
        out, base = WittElement.one(), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other) -> "WittFraction":
        return WittFraction(self, self._coerce(other))

    def scale(self, q) -> "WittElement":
        q = _frac(q)
        return WittElement({g: a * q for g, a in self.terms.items()})

    def sorted_terms(self) -> list[tuple[GroupElement, Fraction]]:
        return sorted(self.terms.items(), key=functools.cmp_to_key(
            lambda s, t: -compare_abs(s[0], t[0])))

    def dominant(self, dps: int = PRECISION) -> tuple[GroupElement, Fraction]:
        if not self.terms:
            raise DomainError("the zero element has no dominant term")
        best = None
        for g, a in self.terms.items():
            if best is None or compare_abs(g, best[0], dps) > 0:
                best = (g, a)
        return best

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for g, a in self.sorted_terms():
            sgn = "-" if a < 0 else "+"
            mag = abs(a)
            coeff = "" if mag == 1 else str(mag)
            out.append(f"{sgn} {coeff}[{g!r}]")
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    # JSON ----------------------------------------------------------------
    def default_basis(self) -> GeneratorBasis:
        primes = sorted({p for g in self.terms for p in g.prime_exponents()})
        nums = sorted({n for g in self.terms for n, _ in g.numeric})
        gens = [GroupElement.of(p) for p in primes] + [GroupElement(numeric={n: 1}) for n in nums]
        return GeneratorBasis(gens)

    def to_json(self, basis: GeneratorBasis | None = None) -> dict:
        basis = basis or self.default_basis()
        return {
            "basis": [_gen_json(g) for g in basis.gens],
            "terms": [{"exp": [str(e) for e in basis.coordinates(g)], "coeff": str(a)}
                      for g, a in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "WittElement":
        basis = GeneratorBasis([_gen_from_json(g) for g in data["basis"]])
        return cls([(basis.element([Fraction(e) for e in t["exp"]]), Fraction(t["coeff"]))
                    for t in data["terms"]])


def _gen_json(g: GroupElement):
    if g.numeric:
        (n, _), = g.numeric
        return {"label": n.label, "value": n.value}
    return str(g.value())


def _gen_from_json(g):
    if isinstance(g, Mapping):
        gen = NumericGenerator(g["label"], g["value"])
        return GroupElement(numeric={gen: Fraction(1)})
    return GroupElement.of(Fraction(g))


class WittFraction:
    """num/den in the fraction field of Q[R+*]."""

    __slots__ = ("num", "den")

    def __init__(self, num: WittElement, den: WittElement | None = None):
        den = WittElement.one() if den is None else den
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.num, self.den = num, den

    @classmethod
    def of(cls, x) -> "WittFraction":
        if isinstance(x, WittFraction):
            return x
        if isinstance(x, WittElement):
            return cls(x)
        return cls(WittElement.scalar(x))

    def __add__(self, other) -> "WittFraction":
        o = WittFraction.of(other)
        return WittFraction(self.num * o.den + o.num * self.den, self.den * o.den)

    def __neg__(self) -> "WittFraction":
        return WittFraction(-self.num, self.den)

    def __sub__(self, other) -> "WittFraction":
        return self + (-WittFraction.of(other))

    def __mul__(self, other) -> "WittFraction":
        o = WittFraction.of(other)
        return WittFraction(self.num * o.num, self.den * o.den)

    def __truediv__(self, other) -> "WittFraction":
        o = WittFraction.of(other)
        return WittFraction(self.num * o.den, self.den * o.num)

    def __eq__(self, other) -> bool:
        o = WittFraction.of(other)
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        raise TypeError("WittFraction is not hashable (no normal form)")

    def __repr__(self) -> str:
        return f"({self.num!r}) / ({self.den!r})"


# --------------------------------------------------------------------------
# the maps


def tau(x) -> WittElement:
    """Teichmueller lift x -> [x], with [-x] = -[x]."""
    g = GroupElement.of(x)
    if g.is_zero:
        raise DomainError("tau(0) is not a group element (tau(0) = 0 by convention)")
    return WittElement({g: Fraction(1)})


def rho_w(X, dps: int = PRECISION) -> GroupElement:
    """Residue map: sign(a0/b0) x0/y0 for the dominant terms of num and den."""
    X = WittFraction.of(X)
    if not X.num:
        return GroupElement.zero()
    x0, a0 = X.num.dominant(dps)
    y0, b0 = X.den.dominant(dps)
    sgn = 1 if (a0 > 0) == (b0 > 0) else -1
    return GroupElement.of(sgn) * (x0 / y0)


def theta(X: WittElement) -> Fraction | float:
    """sum a_i x_i; exact when every x_i is rational."""
    if all(g.is_rational for g in X.terms):
        return sum((a * g.rational for g, a in X.terms.items()), Fraction(0))
    with mpmath.workdps(PRECISION):
        return float(mpmath.fsum(mpmath.mpf(a.numerator) / a.denominator * g.mp_value()
                                 for g, a in X.terms.items()))


def _phi_sum(X: WittElement, z, dps):
    return mpmath.fsum(mpmath.mpf(a.numerator) / a.denominator * mpmath.exp(z * g.mp_log(dps))
                       for g, a in X.terms.items())


def phi_eval(X, z, dps: int = PRECISION, as_mpmath: bool = False):
    """Phi(X)(z) = (sum a_i x_i**z) / (sum b_j y_j**z)."""
    X = WittFraction.of(X)
    with mpmath.workdps(dps + 10):
        zz = mpmath.mpmathify(z)
        den = _phi_sum(X.den, zz, dps)
        if den == 0:
            raise DomainError(f"Phi(X) has a pole at z={z}")
        v = _phi_sum(X.num, zz, dps) / den
        if as_mpmath:
            return v
        return complex(v)


def rho_limit(X, n: int, dps: int = PRECISION):
    """(Phi(X)(2n+1))**(1/(2n+1)) with the real odd root; tends to rho_w(X)."""
    z = 2 * n + 1
    dps = max(dps, int(z * 1.5) + 20)
    with mpmath.workdps(dps):
        v = mpmath.re(phi_eval(X, z, dps, as_mpmath=True))
        if v == 0:
            return 0.0
        return float(mpmath.sign(v) * mpmath.exp(mpmath.log(abs(v)) / z))


def frobenius(lam, X: WittElement) -> WittElement:
    """Fr_lam(sum a_i [x_i]) = sum a_i [x_i**lam] for rational lam > 0."""
    lam = _frac(lam)
    if lam <= 0:
        raise DomainError("Frobenius parameter must be positive")
    return WittElement([(g.power_abs(lam), a) for g, a in X.terms.items()])


def frobenius_fraction(lam, X) -> WittFraction:
    X = WittFraction.of(X)
    return WittFraction(frobenius(lam, X.num), frobenius(lam, X.den))


def _mpf_fraction(x) -> Fraction:
    man, exp = x.man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def entropy_symbol(x) -> WittElement:
    """s(x) = 1 - [x] - [1 - x], an element of Ker(theta).

    Every binary floating point number (Python floats and mpmath reals alike)
    is an exact dyadic rational, so x and 1 - x are always handled exactly and
    the symbol relations hold as identities in the group ring.
    """
    if isinstance(x, mpmath.mpf):
        q = _mpf_fraction(x)
    elif isinstance(x, GroupElement):
        q = x.value()
        if not isinstance(q, Fraction):
            raise DomainError("entropy symbol of a non-rational group element is not representable")
    else:
        q = _frac(x)
    if q == 0 or q == 1:
        raise DomainError("s(x) is undefined for x in {0, 1}")
    return WittElement.one() - tau(q) - tau(1 - q)


def period(p) -> WittElement:
    """pi_p = [p] - p, an element of Ker(theta)."""
    return tau(p) - WittElement.scalar(p)


# --------------------------------------------------------------------------
# jets


@dataclass(frozen=True)
class Jet:
    """Truncated series sum c_k (z-1)**k, k = 0..order."""

    coeffs: tuple

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def _align(self, other: "Jet") -> int:
        return min(self.order, other.order)

    def __add__(self, other: "Jet") -> "Jet":
        n = self._align(other)
        return Jet(tuple(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])))

    def __sub__(self, other: "Jet") -> "Jet":
        n = self._align(other)
        return Jet(tuple(a - b for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1])))

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet(tuple(c * other for c in self.coeffs))
        n = self._align(other)
        a, b = self.coeffs, other.coeffs
        return Jet(tuple(sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n + 1)))

    __rmul__ = __mul__

    def __call__(self, z):
        return sum(c * (z - 1) ** k for k, c in enumerate(self.coeffs))

    def allclose(self, other: "Jet", atol: float = 1e-10, rtol: float = 0.0) -> bool:
        n = self._align(other)
        return all(abs(float(a) - float(b)) <= atol + rtol * abs(float(b))
                   for a, b in zip(self.coeffs[: n + 1], other.coeffs[: n + 1]))


def t_ell_jet(X: WittElement, ell: EllFunctional, order: int = 6) -> Jet:
    """Taylor coefficients at z=1 of sum a_i x_i exp((z-1) l(x_i)).

    c_k = sum_i a_i x_i l(x_i)**k / k!
    """
    if order < 0:
        raise DomainError("order must be >= 0")
    data = [(a, g.value(), ell(g)) for g, a in X.terms.items()]
    exact = all(isinstance(v, Fraction) and isinstance(l, Fraction) for _, v, l in data)
    coeffs = []
    for k in range(order + 1):
        fk = math.factorial(k)
        if exact:
            coeffs.append(sum((a * v * l**k for a, v, l in data), Fraction(0)) / fk)
        else:
            coeffs.append(math.fsum(float(a) * float(v) * float(l) ** k for a, v, l in data) / fk)
    return Jet(tuple(coeffs))


def period_matrix(primes: Sequence[int], ells: Sequence[EllFunctional]) -> list[list]:
    """M[i][j] = first jet coefficient of T_{l_j}(pi_{p_i}) = p_i * l_j(p_i)."""
    if len(set(primes)) != len(primes) or any(not sympy.isprime(p) for p in primes):
        raise DomainError("period_matrix needs distinct primes")
    return [[t_ell_jet(period(p), ell, 1).coeffs[1] for ell in ells] for p in primes]


def dual_ells(primes: Sequence[int]) -> list[EllFunctional]:
    """l_j(p_i) = delta_ij / p_i, so that the period matrix is the identity."""
    basis = prime_basis(primes)
    return [EllFunctional.dual(basis, j, Fraction(1, p)) for j, p in enumerate(primes)]


def delta_psi(X: WittElement, psi: Callable[[float], float]) -> float:
    """sum_j a_j psi(x_j) for an odd function psi (caller's contract)."""
    return math.fsum(float(a) * psi(float(g.value())) for g, a in X.terms.items())


def xlogx(x: float) -> float:
    """psi(x) = x log|x| (odd, with psi(0) = 0); pairs with s(x) to give entropy."""
    return 0.0 if x == 0 else x * math.log(abs(x))


def entropy_value(x: float) -> float:
    """H(x) = -x log|x| - (1-x) log|1-x|, the value of delta_psi on s(x) for psi = xlogx."""
    return -xlogx(x) - xlogx(1 - x)


def number_derivation(n: int) -> dict[int, Fraction]:
    """Components of D(n) = [n] - n on the periods delta_p: e_p * n / p."""
    n = int(n)
    if n == 0:
        raise DomainError("D(0) is undefined")
    return {int(p): Fraction(int(e) * n, int(p)) for p, e in sorted(sympy.factorint(abs(n)).items())}


# --------------------------------------------------------------------------
# literal parser: 2[3] - [5] + 1/2[1/2] + [2^(1/3)] - 7


_TERM = re.compile(r"""
    \s*(?P<sign>[+-])?\s*
    (?P<coeff>\d+(?:/\d+)?)?\s*\*?\s*
    (?:\[(?P<body>[^\]]*)\])?
""", re.VERBOSE)


def _parse_group(body: str) -> GroupElement:
    body = body.strip()
    try:
        if "^" in body:
            base, exp = body.split("^", 1)
            g = GroupElement.of(Fraction(base.strip()))
            return g.theta_power(Fraction(exp.strip().strip("()")))
        return GroupElement.of(Fraction(body))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad group element [{body}]: {exc}") from None


def parse_witt(text: str) -> WittElement:
    """Parse literals like ``2[3]-[5]+[1/2]`` or ``[7]-7`` into a WittElement."""
    pos, terms = 0, []
    text = text.strip()
    if not text:
        raise DomainError("empty Witt literal")
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (m.group("coeff") is None and m.group("body") is None):
            raise DomainError(f"cannot parse Witt literal at {text[pos:]!r}")
        sign = -1 if m.group("sign") == "-" else 1
        coeff = Fraction(m.group("coeff")) if m.group("coeff") else Fraction(1)
        g = _parse_group(m.group("body")) if m.group("body") is not None else GroupElement()
        terms.append((g, sign * coeff))
        pos = m.end()
    return WittElement(terms)
