"""Exponential-polynomial measures on [0, inf) and their Laplace transforms.

An :class:`ExpPolyMeasure` is a finite sum of atoms ``m delta_xi`` plus
densities on half-open intervals ``[l, r)``.  On a piece the density is

    sum_k c_k * s**p_k * exp(-beta_k * s),    s = xi - l,

i.e. terms are stored relative to the left endpoint (the *origin*) of the
piece.  This keeps coefficients of order one on pieces far from 0; the JSON
form states the origin explicitly so that round trips are exact.

The class is closed under addition, convolution, Frobenius rescaling and the
division construction used for the characters ``theta_z0``; every operation
except absolute-value integrals is closed form.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import DivergentVariation, DomainError

INF = math.inf
TOL = 1e-10


def _c(x) -> complex:
    if isinstance(x, (list, tuple)):
        return complex(float(x[0]), float(x[1]))
    return complex(x)


# --------------------------------------------------------------------------
# primitive integrals


def _lower_gamma(k: int, q: complex, w: float) -> complex:
    """int_0^w s**k exp(-q s) ds (w may be inf, then Re q > 0 is required)."""
    if w == INF:
        if q.real <= 0:
            raise DivergentVariation("Laplace integral diverges on an unbounded piece")
        return math.factorial(k) / q ** (k + 1)
    if w == 0:
        return 0j
    if q == 0:
        return complex(w ** (k + 1) / (k + 1))
    qw = q * w
    if abs(qw) <= k + 2:
        total, term, n = 0j, complex(w ** (k + 1)), 0
        while True:
            add = term / (n + k + 1)
            total += add
            n += 1
            term *= -qw / n
            if abs(term) < 1e-18 * max(abs(total), 1e-300) and n > abs(qw):
                break
        return total
    s, t = 0j, 1 + 0j
    for j in range(k + 1):
        s += t
        t *= qw / (j + 1)
    return math.factorial(k) / q ** (k + 1) * (1 - cmath.exp(-qw) * s)


def _antiderivative(n: int, d: complex) -> list[tuple[complex, int, complex]]:
    """Terms (coeff, power, rate) of an antiderivative of s**n exp(-d s)."""
    if d == 0:
        return [(1.0 / (n + 1), n + 1, 0j)]
    fn = math.factorial(n)
    return [(-fn / math.factorial(i) / d ** (n - i + 1), i, d) for i in range(n + 1)]


def _series_antiderivative(n: int, d: complex, smax: float) -> list[tuple[complex, int, complex]]:
    """Taylor form of the same antiderivative (vanishing at 0), for |d|*smax small."""
    out, p, fact = [], 0, 1.0
    x = abs(d) * smax
    while True:
        coeff = (-d) ** p / fact / (n + p + 1)
        out.append((coeff, n + p + 1, 0j))
        p += 1
        fact *= p
        if x ** p / fact < 1e-19:
            break
    return out


# --------------------------------------------------------------------------
# pieces


Term = tuple  # (coeff: complex, power: int, rate: complex)


def _shift_terms(terms: Iterable[Term], d: float) -> list[Term]:
    """Re-express terms in s' = s - d (move the origin right by d >= 0)."""
    if d == 0:
        return list(terms)
    out = []
    for c, k, b in terms:
        e = c * cmath.exp(-b * d)
        for j in range(k + 1):
            out.append((e * math.comb(k, j) * d ** (k - j), j, b))
    return out


def _combine(terms: Iterable[Term]) -> tuple[Term, ...]:
    acc: dict[tuple[int, complex], complex] = {}
    for c, k, b in terms:
        key = (int(k), complex(b))
        acc[key] = acc.get(key, 0j) + complex(c)
    return tuple(sorted(((c, k, b) for (k, b), c in acc.items() if c != 0),
                        key=lambda t: (t[1], t[2].real, t[2].imag)))


@dataclass(frozen=True)
class Piece:
    """Density sum c s**k exp(-b s) on [l, r), s = xi - l."""

    l: float
    r: float
    terms: tuple

    def __post_init__(self):
        if not (0 <= self.l < self.r):
            raise DomainError(f"invalid piece support [{self.l}, {self.r})")
        if self.r == INF and any(b.real < 0 for _, _, b in self.terms):
            raise DomainError("unbounded piece with a growing exponential")

    @property
    def width(self) -> float:
        return self.r - self.l

    def density(self, xi):
        s = np.asarray(xi, dtype=float) - self.l
        out = np.zeros_like(s, dtype=complex)
        for c, k, b in self.terms:
            out += c * s ** k * np.exp(-b * s)
        return out

    def laplace(self, z: complex) -> complex:
        return cmath.exp(-z * self.l) * sum(
            (c * _lower_gamma(k, z + b, self.width) for c, k, b in self.terms), 0j)

    def integral(self, upto: float | None = None) -> complex:
        """int_l^min(upto, r) density."""
        w = self.width if upto is None else min(max(upto - self.l, 0.0), self.width)
        return sum((c * _lower_gamma(k, b, w) for c, k, b in self.terms), 0j)

    @property
    def is_real(self) -> bool:
        return all(c.imag == 0 and b.imag == 0 for c, _, b in self.terms)


# --------------------------------------------------------------------------
# measures


class ExpPolyMeasure:
    """Atoms plus piecewise exponential-polynomial densities on [0, inf)."""

    __slots__ = ("atoms", "pieces")

    def __init__(self, atoms: Mapping | Iterable = (), pieces: Iterable[Piece] = ()):
        acc: dict[float, complex] = {}
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        for xi, m in items:
            xi = float(xi)
            if xi < 0 or math.isnan(xi) or xi == INF:
                raise DomainError(f"atom position {xi} outside [0, inf)")
            acc[xi] = acc.get(xi, 0j) + _c(m)
        self.atoms: tuple = tuple(sorted((x, m) for x, m in acc.items() if m != 0))
        self.pieces: tuple = _normalize_pieces(list(pieces))

    # -- constructors ----------------------------------------------------
    @classmethod
    def zero(cls) -> "ExpPolyMeasure":
        return cls()

    @classmethod
    def atom(cls, xi: float, mass=1.0) -> "ExpPolyMeasure":
        return cls([(xi, mass)])

    @classmethod
    def piece(cls, l: float, r: float, terms: Sequence) -> "ExpPolyMeasure":
        """Density on [l, r); ``terms`` are (coeff, power, rate) in the global variable xi."""
        glob = [(_c(c), int(k), _c(b)) for c, k, b in terms]
        local = [(c * cmath.exp(-b * l), k, b) for c, k, b in glob]
        local = [t for c, k, b in local for t in _binomial_local(c, k, b, l)]
        return cls(pieces=[Piece(float(l), float(r), _combine(local))])

    @classmethod
    def local_piece(cls, l: float, r: float, terms: Sequence) -> "ExpPolyMeasure":
        """Density on [l, r) with terms in the local variable s = xi - l."""
        return cls(pieces=[Piece(float(l), float(r), _combine((_c(c), int(k), _c(b)) for c, k, b in terms))])

    @classmethod
    def iota(cls) -> "ExpPolyMeasure":
        """Lebesgue measure on [0, inf); Laplace transform 1/z."""
        return cls.local_piece(0.0, INF, [(1, 0, 0)])

    # -- structure -------------------------------------------------------
    def __eq__(self, other) -> bool:
        return isinstance(other, ExpPolyMeasure) and self.atoms == other.atoms and self.pieces == other.pieces

    def __hash__(self) -> int:
        return hash((self.atoms, self.pieces))

    def __bool__(self) -> bool:
        return bool(self.atoms or self.pieces)

    def __repr__(self) -> str:
        return f"ExpPolyMeasure(atoms={list(self.atoms)}, pieces={list(self.pieces)})"

    @property
    def is_real(self) -> bool:
        return all(m.imag == 0 for _, m in self.atoms) and all(p.is_real for p in self.pieces)

    @property
    def is_atomic(self) -> bool:
        return not self.pieces

    def __add__(self, other: "ExpPolyMeasure") -> "ExpPolyMeasure":
        return ExpPolyMeasure(self.atoms + other.atoms, self.pieces + other.pieces)

    def scale(self, a) -> "ExpPolyMeasure":
        a = _c(a)
        if a == 0:
            return ExpPolyMeasure()
        return ExpPolyMeasure([(x, a * m) for x, m in self.atoms],
                              [Piece(p.l, p.r, tuple((a * c, k, b) for c, k, b in p.terms)) for p in self.pieces])

    def __neg__(self) -> "ExpPolyMeasure":
        return self.scale(-1)

    def __sub__(self, other: "ExpPolyMeasure") -> "ExpPolyMeasure":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ExpPolyMeasure):
            return convolve(self, other)
        return self.scale(other)

    __rmul__ = scale

    def shift(self, a: float) -> "ExpPolyMeasure":
        """Translate the measure by a >= 0 (convolution with delta_a)."""
        return ExpPolyMeasure([(x + a, m) for x, m in self.atoms],
                              [Piece(p.l + a, p.r + a, p.terms) for p in self.pieces if p.l + a < p.r + a])

    def restrict(self, lo: float, hi: float) -> "ExpPolyMeasure":
        """Restriction to [lo, hi)."""
        atoms = [(x, m) for x, m in self.atoms if lo <= x < hi]
        pieces = []
        for p in self.pieces:
            a, b = max(p.l, lo), min(p.r, hi)
            if a < b:
                pieces.append(Piece(a, b, _combine(_shift_terms(p.terms, a - p.l))))
        return ExpPolyMeasure(atoms, pieces)

    def density(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = np.zeros_like(xi, dtype=complex)
        for p in self.pieces:
            mask = (xi >= p.l) & (xi < p.r)
            if mask.any():
                out[mask] = p.density(xi[mask])
        return out

    # -- JSON ------------------------------------------------------------
    def to_json(self) -> dict:
        def num(x):
            return "inf" if x == INF else x

        return {
            "atoms": [{"xi": x, "mass": [m.real, m.imag]} for x, m in self.atoms],
            "pieces": [
                {"l": p.l, "r": num(p.r), **({"origin": p.l} if p.l != 0 else {}),
                 "terms": [{"coeff": [c.real, c.imag], "power": k, "rate": [b.real, b.imag]}
                           for c, k, b in p.terms]}
                for p in self.pieces
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ExpPolyMeasure":
        atoms = [(float(a["xi"]), _c(a["mass"])) for a in data.get("atoms", [])]
        out = cls(atoms)
        for p in data.get("pieces", []):
            l = float(p["l"])
            r = INF if p["r"] in ("inf", "Infinity", None) else float(p["r"])
            terms = [(_c(t["coeff"]), int(t["power"]), _c(t["rate"])) for t in p["terms"]]
            origin = float(p.get("origin", 0.0))
            if origin == l:
                out = out + cls.local_piece(l, r, terms)
            elif origin == 0:
                out = out + cls.piece(l, r, terms)
            else:
                raise DomainError("piece origin must be 0 or the left endpoint")
        return out


def _binomial_local(c: complex, k: int, b: complex, l: float) -> list[Term]:
    """c (s + l)**k exp(-b s) expanded in s (exp(-b l) already folded into c)."""
    return [(c * math.comb(k, j) * l ** (k - j), j, b) for j in range(k + 1)]


def _normalize_pieces(pieces: list[Piece]) -> tuple:
    pieces = [p for p in pieces if p.terms]
    if not pieces:
        return ()
    cuts = sorted({p.l for p in pieces} | {p.r for p in pieces})
    out: list[Piece] = []
    for a, b in zip(cuts, cuts[1:]):
        acc = []
        for p in pieces:
            if p.l <= a and b <= p.r:
                acc.extend(_shift_terms(p.terms, a - p.l))
        terms = _combine(acc)
        if terms:
            out.append(Piece(a, b, terms))
    return tuple(out)


atom = ExpPolyMeasure.atom
iota = ExpPolyMeasure.iota


# --------------------------------------------------------------------------
# convolution


def _conv_pieces(p1: Piece, p2: Piece) -> list[Piece]:
    w1, w2 = p1.width, p2.width
    L = p1.l + p2.l
    cuts = sorted({0.0, w1, w2, w1 + w2})
    acc: dict[tuple[float, float], list[Term]] = {}
    for ta, tb in zip(cuts, cuts[1:]):
        for c1, a, b1 in p1.terms:
            for c2, b, b2 in p2.terms:
                for sa, sb, terms in _conv_region(c1, a, b1, c2, b, b2, w1, w2, ta, tb):
                    acc.setdefault((sa, sb), []).extend(terms)
    out: list[Piece] = []
    for (ta, tb), terms in acc.items():
        local = _combine(_shift_terms(_combine(terms), ta))
        if local and L + ta < L + tb:
            out.append(Piece(L + ta, L + tb, local))
    return out


def _cancellation(n: int, x: float) -> float:
    """log of the relative accuracy lost by the closed-form antiderivative at |d| s = x."""
    return math.lgamma(n + 2) - (n + 1) * math.log(x) if x > 0 else INF


_LOG_1E4 = math.log(1e4)


def _conv_region(c1, a, b1, c2, b, b2, w1, w2, ta, tb):
    """Convolution of one term pair on tau in [ta, tb); tau has origin l1 + l2.

    Returns a list of (start, end, terms-in-tau).  With s the variable of the
    first factor, the integration range is [lo, hi] with lo in {0, tau - w2}
    and hi in {tau, w1}.  Whenever the range has constant length the
    integral is taken over a variable with constant limits, which needs no
    antiderivative differences and is free of cancellation.
    """
    d = b1 - b2
    mid = ta + 1.0 if tb == INF else 0.5 * (ta + tb)
    lo_shift = mid > w2
    hi_const = mid > w1
    pref = c1 * c2
    if not lo_shift and hi_const:
        # s in [0, w1]: sum_j C(b,j) (-1)^j tau^(b-j) exp(-b2 tau) int_0^w1 s^(a+j) exp(-d s) ds
        terms = [(pref * math.comb(b, j) * (-1) ** j * _lower_gamma(a + j, d, w1), b - j, b2)
                 for j in range(b + 1)]
        return [(ta, tb, terms)]
    if lo_shift and not hi_const:
        # u = tau - s in [0, w2]: sum_i C(a,i) (-1)^i tau^(a-i) exp(-b1 tau) int_0^w2 u^(b+i) exp(d u) du
        terms = [(pref * math.comb(a, i) * (-1) ** i * _lower_gamma(b + i, -d, w2), a - i, b1)
                 for i in range(a + 1)]
        return [(ta, tb, terms)]
    if not lo_shift:
        # s in [0, tau]
        if d == 0:
            beta = Fraction(math.factorial(a) * math.factorial(b), math.factorial(a + b + 1))
            return [(ta, tb, [(pref * float(beta), a + b + 1, b2)])]
        n = a + b
        t_star = 2.0 / abs(d)
        if tb <= t_star:
            series = _cancellation(n, abs(d) * tb) > _LOG_1E4
            return [(ta, tb, _antiderivative_terms(pref, a, b, b2, d, tb, series, False, w1, w2))]
        if math.lgamma(n + 1) - (n + 1) * math.log(abs(d)) <= _LOG_1E4 or t_star <= ta:
            return [(ta, tb, _antiderivative_terms(pref, a, b, b2, d, tb, False, False, w1, w2))]
        return [(ta, t_star, _antiderivative_terms(pref, a, b, b2, d, t_star, True, False, w1, w2)),
                (t_star, tb, _antiderivative_terms(pref, a, b, b2, d, tb, False, False, w1, w2))]
    # s in [tau - w2, w1]
    series = d != 0 and abs(d) * w1 < 2.0 and _cancellation(a + b, abs(d) * w1) > _LOG_1E4
    return [(ta, tb, _antiderivative_terms(pref, a, b, b2, d, w1, series, True, w1, w2))]


def _antiderivative_terms(pref, a, b, b2, d, smax, series, lo_shift, w1, w2) -> list[Term]:
    """Terms in tau of pref * exp(-b2 tau) int_lo^hi s^a (tau - s)^b exp(-d s) ds.

    hi is tau (lo_shift False, lo = 0) or w1 (lo_shift True, lo = tau - w2).
    """
    out: list[Term] = []
    for j in range(b + 1):
        cj = pref * math.comb(b, j) * (-1) ** j
        n = a + j
        anti = _series_antiderivative(n, d, smax) if series else _antiderivative(n, d)
        if lo_shift:
            hi_terms = [(sum(cc * w1 ** kk * cmath.exp(-rr * w1) for cc, kk, rr in anti), 0, 0j)]
            lo_terms = []
            for cc, kk, rr in anti:
                e = cc * cmath.exp(rr * w2)
                for q in range(kk + 1):
                    lo_terms.append((e * math.comb(kk, q) * (-w2) ** (kk - q), q, rr))
        else:
            hi_terms = anti
            lo_terms = [(sum(cc for cc, kk, _ in anti if kk == 0), 0, 0j)]
        for cc, kk, rr in hi_terms:
            out.append((cj * cc, kk + b - j, rr + b2))
        for cc, kk, rr in lo_terms:
            out.append((-cj * cc, kk + b - j, rr + b2))
    return out


def convolve(mu1: ExpPolyMeasure, mu2: ExpPolyMeasure) -> ExpPolyMeasure:
    atoms = [(x1 + x2, m1 * m2) for x1, m1 in mu1.atoms for x2, m2 in mu2.atoms]
    pieces: list[Piece] = []
    for x, m in mu1.atoms:
        pieces += [Piece(p.l + x, p.r + x, tuple((m * c, k, b) for c, k, b in p.terms))
                   for p in mu2.pieces if p.l + x < p.r + x]
    for x, m in mu2.atoms:
        pieces += [Piece(p.l + x, p.r + x, tuple((m * c, k, b) for c, k, b in p.terms))
                   for p in mu1.pieces if p.l + x < p.r + x]
    for p1 in mu1.pieces:
        for p2 in mu2.pieces:
            pieces += _conv_pieces(p1, p2)
    return ExpPolyMeasure(atoms, pieces)


# --------------------------------------------------------------------------
# Laplace transform and characters


def laplace(mu: ExpPolyMeasure, z) -> complex:
    """f(z) = int exp(-xi z) dmu(xi) for Re z > 0."""
    z = complex(z)
    if z.real <= 0:
        raise DomainError("laplace needs Re z > 0")
    return sum((m * cmath.exp(-z * x) for x, m in mu.atoms), 0j) + sum((p.laplace(z) for p in mu.pieces), 0j)


def char_theta(z0, mu: ExpPolyMeasure) -> complex:
    """The character theta_z0(f) = f(z0); theta_1 restricts to theta on the Witt side."""
    return laplace(mu, z0)


def epsilon(mu: ExpPolyMeasure) -> complex:
    """lim_{z -> inf} f(z): the mass of the atom at 0 (also written theta_inf)."""
    return next((m for x, m in mu.atoms if x == 0.0), 0j)


# --------------------------------------------------------------------------
# variation and norms


def _weighted(mu: ExpPolyMeasure, alpha: float) -> ExpPolyMeasure:
    """exp(-alpha xi) dmu(xi)."""
    if alpha == 0:
        return mu
    return ExpPolyMeasure(
        [(x, m * math.exp(-alpha * x)) for x, m in mu.atoms],
        [Piece(p.l, p.r, tuple((c * math.exp(-alpha * p.l), k, b + alpha) for c, k, b in p.terms))
         for p in mu.pieces])


def _abs_piece_real(p: Piece, tol: float) -> float:
    """int |density| over a real piece, exact between isolated sign changes."""
    terms = [(c.real, k, b.real) for c, k, b in p.terms]
    w = p.width
    if w == INF and any(b == 0 for _, _, b in terms):
        raise DivergentVariation("density does not decay on an unbounded piece")
    rates = sorted({b for _, _, b in terms})
    if len(rates) == 1:
        coeffs = np.zeros(max(k for _, k, _ in terms) + 1)
        for c, k, _ in terms:
            coeffs[k] += c
        roots = np.roots(coeffs[::-1]) if np.count_nonzero(coeffs) > 1 else np.array([])
        cand = sorted(float(r.real) for r in roots if abs(r.imag) <= 1e-9 * max(1, abs(r)) and 0 < r.real < w)
    else:
        f = lambda s: sum(c * s ** k * math.exp(-b * s) for c, k, b in terms)
        span = w
        if w == INF:
            bmin = min(rates)
            kmax = max(k for _, k, _ in terms)
            span = (60.0 + 2 * kmax * math.log(kmax + 2)) / bmin
        grid = np.linspace(0, span, 4001)
        vals = np.zeros_like(grid)
        for c, k, b in terms:
            vals += c * grid ** k * np.exp(-b * grid)
        cand = [float(grid[i]) for i in np.flatnonzero(vals[1:-1] == 0) + 1]
        for i in np.flatnonzero(vals[:-1] * vals[1:] < 0):
            lo, hi = float(grid[i]), float(grid[i + 1])
            flo, fhi = f(lo), f(hi)
            if flo * fhi < 0:
                cand.append(float(optimize.brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)))
            else:
                # vectorized and scalar sums disagree in sign: the root sits at a grid point
                cand.append(lo if abs(flo) <= abs(fhi) else hi)
        cand.sort()
    edges = [0.0] + cand + [w]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        seg = math.fsum(c * (_lower_gamma(k, complex(r), b) - _lower_gamma(k, complex(r), a)).real
                        for c, k, r in terms)
        total += abs(seg)
    return total


def _abs_piece_complex(p: Piece, tol: float) -> float:
    if p.r == INF and any(b.real == 0 for _, _, b in p.terms):
        raise DivergentVariation("density does not decay on an unbounded piece")
    f = lambda s: abs(sum(c * s ** k * cmath.exp(-b * s) for c, k, b in p.terms))
    val, _ = integrate.quad(f, 0, p.width, epsabs=0.0, epsrel=tol, limit=500)
    return float(val)


def total_variation(mu: ExpPolyMeasure, tol: float = TOL) -> float:
    """|mu|([0, inf)); raises DivergentVariation for infinite variation."""
    total = math.fsum(abs(m) for _, m in mu.atoms)
    for p in mu.pieces:
        total += _abs_piece_real(p, tol) if p.is_real else _abs_piece_complex(p, tol)
    return total


def variation_function(mu: ExpPolyMeasure, xi: float, tol: float = TOL) -> float:
    """T(xi) = |mu|([0, xi))."""
    return total_variation(mu.restrict(0.0, xi), tol)


def norm_rho(mu: ExpPolyMeasure, rho: float, tol: float = TOL) -> float:
    """||f||_rho = int exp(-alpha xi) |dmu|, alpha = -1/log(rho)."""
    if not 0 < rho < 1:
        raise DomainError("rho must lie in (0, 1)")
    return total_variation(_weighted(mu, -1.0 / math.log(rho)), tol)


def norm_alpha(mu: ExpPolyMeasure, alpha: float, tol: float = TOL) -> float:
    """int exp(-alpha xi) |dmu|; norm_rho with alpha = -1/log(rho) given directly."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    return total_variation(_weighted(mu, alpha), tol)


def norm_zero(mu: ExpPolyMeasure, tol: float = TOL) -> float:
    return total_variation(mu, tol)


# --------------------------------------------------------------------------
# Frobenius, leading term, ideals


def frobenius(lam: float, mu: ExpPolyMeasure) -> ExpPolyMeasure:
    """Push-forward by xi -> lam xi, so that laplace(Fr_lam mu)(z) = laplace(mu)(lam z)."""
    lam = float(lam)
    if not lam > 0:
        raise DomainError("Frobenius parameter must be positive")
    if lam == 1:
        return mu
    return ExpPolyMeasure(
        [(lam * x, m) for x, m in mu.atoms],
        [Piece(lam * p.l, lam * p.r, tuple((c / lam ** (k + 1), k, b / lam) for c, k, b in p.terms))
         for p in mu.pieces])


def inf_support(mu: ExpPolyMeasure) -> float:
    if not mu:
        raise DomainError("the zero measure has empty support")
    cands = [x for x, _ in mu.atoms] + [p.l for p in mu.pieces]
    return min(cands)


def leading(mu: ExpPolyMeasure) -> float:
    """|rho|(f) = exp(-inf supp mu), a multiplicative map on nonzero measures."""
    return math.exp(-inf_support(mu))


def is_in_B0(mu: ExpPolyMeasure) -> bool:
    """True when every atom sits at 0 (absolutely continuous part plus scalar)."""
    return all(x == 0.0 for x, _ in mu.atoms)


def h_lambda(lam) -> ExpPolyMeasure:
    """Density exp(-lam xi) on [0, inf); solves (lam iota + 1) h = iota."""
    lam = complex(lam)
    if lam == 0 or lam.real < 0:
        raise DomainError("h_lambda needs lam != 0 and Re lam >= 0")
    if lam.real == 0:
        raise DivergentVariation("Re lam = 0 gives a non-decaying density")
    return ExpPolyMeasure.local_piece(0.0, INF, [(1, 0, lam)])


def embed_witt(X) -> ExpPolyMeasure:
    """sum a_i [x_i] -> sum a_i delta_{-log x_i}; needs every x_i in (0, 1]."""
    atoms = []
    for g, a in X.terms.items():
        xi = -g.log()
        if xi < 0:
            raise DomainError(f"group element {g!r} exceeds 1; its atom would sit at xi < 0")
        atoms.append((xi + 0.0, float(a)))
    return ExpPolyMeasure(atoms)


# --------------------------------------------------------------------------
# division by iota - 1/z0


def _psi_density(mu: ExpPolyMeasure, z0: complex) -> ExpPolyMeasure:
    """Density psi(u) = int_u^inf exp(z0 (u - xi)) dmu(xi) as an ExpPolyMeasure."""
    out: list[Piece] = []
    for x, m in mu.atoms:
        if x > 0:
            out.append(Piece(0.0, x, ((m * cmath.exp(-z0 * x), 0, -z0),)))
    for p in mu.pieces:
        w = p.width
        for c, k, b in p.terms:
            g = b + z0
            if g == 0:
                # psi on [l, r): c exp(z0 t) (w**(k+1) - t**(k+1))/(k+1)
                aw = w ** (k + 1) / (k + 1)
                inner = [(c * aw, 0, -z0), (-c / (k + 1), k + 1, -z0)]
                total = c * aw
            else:
                aw = 0j if w == INF else -cmath.exp(-g * w) * sum(
                    math.factorial(k) / math.factorial(i) * w ** i / g ** (k - i + 1) for i in range(k + 1))
                inner = [(c * aw, 0, -z0)] if aw != 0 else []
                inner += [(c * math.factorial(k) / math.factorial(i) / g ** (k - i + 1), i, b)
                          for i in range(k + 1)]
                total = c * (aw + math.factorial(k) / g ** (k + 1))
            out.append(Piece(p.l, p.r, _combine(inner)))
            if p.l > 0:
                out.append(Piece(0.0, p.l, ((total * cmath.exp(-z0 * p.l), 0, -z0),)))
    return ExpPolyMeasure((), out)


def divide_at(mu: ExpPolyMeasure, z0, tol: float = 1e-9) -> ExpPolyMeasure:
    """h with f(z) = f(z0) + (1/z - 1/z0) h(z), for f = laplace(mu) vanishing at z0.

    The construction is h = -z0 (mu - f(z0) delta_0) + z0**2 k where k has the
    density psi above; f(z0) must be within ``tol`` of zero.
    """
    z0 = complex(z0)
    if z0.real <= 0:
        raise DomainError("divide_at needs Re z0 > 0")
    if not mu:
        return ExpPolyMeasure()
    f0 = laplace(mu, z0)
    if abs(f0) > tol:
        raise DomainError(f"measure is not in the kernel of theta_z0: |f(z0)| = {abs(f0):.3g}")
    k = _psi_density(mu, z0)
    return (mu - ExpPolyMeasure.atom(0.0, f0)).scale(-z0) + k.scale(z0 * z0)


def kernel_element(mu: ExpPolyMeasure, z0) -> ExpPolyMeasure:
    """mu - f(z0) delta_0, an element of Ker(theta_z0)."""
    return mu - ExpPolyMeasure.atom(0.0, laplace(mu, z0))


# --------------------------------------------------------------------------
# canonical decomposition


@dataclass(frozen=True)
class DecompositionProfile:
    """Step data for s -> f_s.

    ``starts[k]`` is where segment k begins (``starts[0] == s0``), ``values[k]``
    is f_s there (sign times exp(-xi_k), with xi_k kept in ``xis[k]`` because
    the value itself may underflow) and ``weights[k]`` is the u-length
    exp(-starts[k]) - exp(-starts[k+1]) of the segment, stored explicitly so
    reconstruction is exact.  ``error`` is the certified reconstruction error
    (0 for atomic measures).
    """

    s0: float
    starts: tuple
    values: tuple
    weights: tuple
    xis: tuple
    error: float = 0.0

    def value(self, s: float) -> float:
        if s < self.s0:
            raise DomainError("f_s is defined only for s >= s0")
        i = int(np.searchsorted(self.starts, s, side="right")) - 1
        return self.values[i]

    def reconstruct(self, z) -> complex:
        """int_{s0}^inf [f_s](z) exp(-s) ds with [v](z) = sign(v)|v|**z."""
        z = complex(z)
        terms = [w * math.copysign(1.0, v) * cmath.exp(-z * x)
                 for v, w, x in zip(self.values, self.weights, self.xis)]
        return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))

    def to_json(self) -> dict:
        return {"s0": self.s0, "starts": list(self.starts), "values": list(self.values),
                "weights": list(self.weights), "xis": list(self.xis), "error": self.error}

    @classmethod
    def from_json(cls, d: Mapping) -> "DecompositionProfile":
        return cls(float(d["s0"]), tuple(d["starts"]), tuple(d["values"]), tuple(d["weights"]),
                   tuple(d["xis"]), float(d.get("error", 0.0)))


def _profile_from_points(points: list[tuple[float, float]], error: float) -> DecompositionProfile:
    """points: (xi, signed mass), sorted by xi; masses nonzero."""
    points = [(x, m) for x, m in points if m != 0]
    V = math.fsum(abs(m) for _, m in points)
    starts, values, weights = [], [], []
    T = 0.0
    for x, m in points:
        starts.append(-math.log(V - T) if V - T > 0 else INF)
        values.append(math.copysign(math.exp(-x), m))
        weights.append(abs(m))
        T += abs(m)
    xis = tuple(x for x, _ in points)
    return DecompositionProfile(-math.log(V), tuple(starts), tuple(values), tuple(weights), xis, error)


def _gauss_points(p: Piece, panels: int, order: int = 12, tail_eps: float = 1e-17):
    nodes, wts = np.polynomial.legendre.leggauss(order)
    w = p.width
    if w == INF:
        bmin = min(b.real for _, _, b in p.terms)
        if bmin <= 0:
            raise DivergentVariation("density does not decay on an unbounded piece")
        kmax = max(k for _, k, _ in p.terms)
        w = (-math.log(tail_eps) + 3 * kmax * math.log(kmax + 2)) / bmin
    edges = np.linspace(0.0, w, panels + 1)
    out = []
    for a, b in zip(edges, edges[1:]):
        s = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        vals = sum(c * s ** k * np.exp(-b_ * s) for c, k, b_ in p.terms).real
        for si, v, wi in zip(s, vals, wts):
            out.append((p.l + float(si), float(v) * 0.5 * (b - a) * float(wi)))
    return out


def decompose(mu: ExpPolyMeasure, tol: float = 1e-8) -> DecompositionProfile:
    """Canonical decomposition f = int_{s0}^inf [f_s] exp(-s) ds of a real measure.

    Atomic measures give exact step data.  Densities are replaced by weighted
    Gauss nodes, refined until reconstruction agrees with the exact Laplace
    transform at z in {1, 2, 5} within ``tol``.
    """
    if not mu:
        raise DomainError("the zero measure has no canonical decomposition")
    if not mu.is_real:
        raise DomainError("decompose needs a real measure")
    atoms = [(x, m.real) for x, m in mu.atoms]
    if mu.is_atomic:
        return _profile_from_points(atoms, 0.0)
    checks = (1.0, 2.0, 5.0)
    exact = [laplace(mu, z) for z in checks]
    panels = 2
    while True:
        pts = list(atoms)
        for p in mu.pieces:
            scale = 1.0 + max(abs(b) for _, _, b in p.terms) * min(p.width, 50.0)
            pts += _gauss_points(p, panels * int(math.ceil(scale)))
        pts.sort(key=lambda t: t[0])
        prof = _profile_from_points(pts, 0.0)
        err = max(abs(prof.reconstruct(z) - e) for z, e in zip(checks, exact))
        if err <= tol or panels >= 4096:
            if err > tol:
                raise DomainError(f"decomposition did not reach tolerance {tol:g} (error {err:.3g})")
            return DecompositionProfile(prof.s0, prof.starts, prof.values, prof.weights, prof.xis, err)
        panels *= 2


def reconstruct(profile: DecompositionProfile):
    """Laplace evaluator z -> int [f_s](z) exp(-s) ds of a profile."""
    return profile.reconstruct
