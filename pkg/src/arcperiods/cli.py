"""Command-line front end: ``arcperiods <group> <command> [args]``.

Output is JSON by default, or CSV with ``--format csv`` for tabular results.
Floats are written with 17 significant digits and infinities as ``"inf"``.

Exit codes: 0 success, 1 failed acceptance check, 2 domain error,
3 precision exhausted, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import acceptance, deformation, hyperfield, measure_algebra as ma, mikusinski, witt_algebra as wa
from .errors import DomainError, PrecisionExhausted

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_PRECISION, EXIT_USAGE = 0, 1, 2, 3, 64

WITT_GRAMMAR = """\
Witt literals:
  element := term (('+' | '-') term)*
  term    := [coeff] ['*'] '[' group ']'  |  coeff
  coeff   := integer | integer '/' integer
  group   := rational | rational '^' '(' rational ')'
A bare coefficient c stands for c[1].  Examples: '2[3]-[5]+[1/2]', '[2^(1/3)]',
'[7]-7'.  Any argument ending in .json is read as WittElement JSON instead.
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# output


class Table:
    def __init__(self, header: Sequence[str], rows: Sequence[Sequence]):
        self.header, self.rows = list(header), [list(r) for r in rows]


def _num(x):
    if isinstance(x, bool) or x is None or isinstance(x, (str, int)):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    if isinstance(x, complex):
        return _num(x.real) if x.imag == 0 else [_num(x.real), _num(x.imag)]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return _Float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return str(x)


class _Float(float):
    def __repr__(self):
        return format(float(self), ".17g")


def _encode(o, depth: int = 0) -> str:
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(o, dict):
        if not o:
            return "{}"
        items = (f"{inner}{json.dumps(k)}: {_encode(v, depth + 1)}" for k, v in o.items())
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(o, list):
        if not o:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in o):
            return "[" + ", ".join(_encode(v) for v in o) + "]"
        return "[\n" + ",\n".join(inner + _encode(v, depth + 1) for v in o) + "\n" + pad + "]"
    if isinstance(o, _Float):
        return repr(o)
    return json.dumps(o)


def dumps(obj) -> str:
    return _encode(_num(obj))


def _cell(v) -> str:
    v = _num(v)
    if isinstance(v, list):
        return " ".join(_cell(x) for x in v)
    return "" if v is None else repr(v) if isinstance(v, _Float) else str(v)


def render(result, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if isinstance(result, Table):
            w.writerow(result.header)
            w.writerows([_cell(v) for v in row] for row in result.rows)
        elif isinstance(result, dict) and all(not isinstance(v, (dict, list, tuple)) for v in result.values()):
            w.writerow(list(result))
            w.writerow([_cell(v) for v in result.values()])
        else:
            raise UsageError("this result is not tabular; use --format json")
        return buf.getvalue()
    if isinstance(result, Table):
        result = [dict(zip(result.header, row)) for row in result.rows]
    return dumps(result) + "\n"


# --------------------------------------------------------------------------
# input helpers


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path} is not valid JSON: {exc}") from None


def _measure(path: str) -> ma.ExpPolyMeasure:
    try:
        return ma.ExpPolyMeasure.from_json(_read_json(path))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"{path} is not a measure: {exc}") from None


def _witt(text: str) -> wa.WittElement:
    if text.endswith(".json"):
        try:
            return wa.WittElement.from_json(_read_json(text))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"{text} is not a WittElement: {exc}") from None
    return wa.parse_witt(text)


def _number(text: str):
    """Exact Fraction when the literal is rational, else float."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        pass
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"not a complex number: {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"not a list of numbers: {text!r}") from None


def _group_json(g: wa.GroupElement) -> dict:
    v = g.value()
    return {"element": repr(g), "value": v, "log": None if g.is_zero else g.log()}


# --------------------------------------------------------------------------
# hyper


def cmd_hyper_add(a, ctx):
    return hyperfield.hyper_add(_number(a.x), _number(a.y)).to_json()


def cmd_hyper_mul(a, ctx):
    return {"value": hyperfield.hyper_mul(_number(a.x), _number(a.y))}


def cmd_hyper_deformed(a, ctx):
    return {"value": hyperfield.deformed_add(_number(a.x), _number(a.y), a.m, _number(a.kappa))}


def cmd_hyper_limit(a, ctx):
    return {"value": hyperfield.naive_limit_add(_number(a.x), _number(a.y))}


def cmd_hyper_grid(a, ctx):
    rows = hyperfield.graph_grid(a.m, _number(a.kappa), (a.lo, a.hi), (a.lo, a.hi), a.resolution)
    if a.out:
        with open(a.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(hyperfield.grid_to_csv(rows))
        near = sum(1 for x, y, v in rows if abs(v - (x if abs(x) >= abs(y) else y)) <= ctx.tol * max(1.0, abs(v)))
        return {"written": a.out, "points": len(rows), "at_max_abs": near}
    return Table(["x", "y", "value"], rows)


# --------------------------------------------------------------------------
# witt


def cmd_witt_rho(a, ctx):
    return _group_json(wa.rho_w(_witt(a.element), ctx.precision))


def cmd_witt_theta(a, ctx):
    return {"value": wa.theta(_witt(a.element))}


def cmd_witt_frobenius(a, ctx):
    return wa.frobenius(_number(a.lam), _witt(a.element)).to_json()


def cmd_witt_parse(a, ctx):
    return _witt(a.element).to_json()


def cmd_witt_jet(a, ctx):
    X = _witt(a.element)
    if a.ell == "log":
        ell = wa.EllFunctional.log()
    else:
        basis = X.default_basis()
        vals = [_number(v) for v in a.ell.replace(",", " ").split()]
        ell = wa.EllFunctional(basis, vals)
    jet = wa.t_ell_jet(X, ell, a.order)
    return Table(["k", "coeff"], list(enumerate(jet.coeffs)))


def cmd_witt_periods(a, ctx):
    primes = [int(p) for p in a.primes]
    M = wa.period_matrix(primes, wa.dual_ells(primes))
    return Table(["prime"] + [f"ell_{p}" for p in primes], [[p] + row for p, row in zip(primes, M)])


def cmd_witt_derive(a, ctx):
    try:
        n = int(a.n)
    except ValueError:
        raise UsageError(f"not an integer: {a.n!r}") from None
    return Table(["prime", "component"], sorted(wa.number_derivation(n).items()))


def cmd_witt_entropy(a, ctx):
    x = _number(a.x)
    return wa.entropy_symbol(x).to_json()


# --------------------------------------------------------------------------
# measure


def cmd_measure_conv(a, ctx):
    return ma.convolve(_measure(a.first), _measure(a.second)).to_json()


def cmd_measure_laplace(a, ctx):
    return {"value": ma.laplace(_measure(a.measure), _complex(a.z))}


def cmd_measure_epsilon(a, ctx):
    return {"value": ma.epsilon(_measure(a.measure))}


def cmd_measure_norm(a, ctx):
    mu = _measure(a.measure)
    if a.rho is None:
        return {"value": ma.total_variation(mu, ctx.tol)}
    if a.rho == 0:
        return {"value": ma.norm_zero(mu, ctx.tol)}
    return {"value": ma.norm_rho(mu, a.rho, ctx.tol)}


def cmd_measure_decompose(a, ctx):
    return ma.decompose(_measure(a.measure), a.tol if a.tol is not None else ctx.tol).to_json()


def cmd_measure_divide(a, ctx):
    return ma.divide_at(_measure(a.measure), _complex(a.z0), ctx.tol).to_json()


def cmd_measure_frobenius(a, ctx):
    return ma.frobenius(a.lam, _measure(a.measure)).to_json()


def cmd_measure_leading(a, ctx):
    mu = _measure(a.measure)
    return {"inf_support": ma.inf_support(mu), "leading": ma.leading(mu)}


def cmd_measure_embed(a, ctx):
    return ma.embed_witt(_witt(a.element)).to_json()


# --------------------------------------------------------------------------
# mikusinski


def _samples(text: str | None) -> list[float]:
    return _floats(text) if text else list(mikusinski.DEFAULT_SAMPLES)


def _fn_table(F: mikusinski.PrimitiveFn, samples) -> Table:
    vals = F(np.asarray(samples, dtype=float))
    return Table(["t", "value"], [[t, complex(v)] for t, v in zip(samples, vals)])


def cmd_mik_embed(a, ctx):
    F = mikusinski.primitive(_measure(a.measure), strict=a.strict)
    if a.samples or ctx.fmt == "csv":
        return _fn_table(F, _samples(a.samples))
    return F.to_json()


def cmd_mik_duhamel(a, ctx):
    F = mikusinski.primitive(_measure(a.first))
    G = mikusinski.primitive(_measure(a.second))
    H = mikusinski.duhamel(F, G)
    if a.samples or ctx.fmt == "csv":
        return _fn_table(H, _samples(a.samples))
    return H.to_json()


# --------------------------------------------------------------------------
# deform


def cmd_deform_sum(a, ctx):
    xs = [float(_number(x)) for x in a.values]
    return {"value": deformation.deformed_sum_many(xs, a.hbar)}


def cmd_deform_funeq(a, ctx):
    rng = np.random.default_rng(ctx.seed)
    rows = []
    for _ in range(a.samples):
        al, be = rng.uniform(0.01, 0.99, 2)
        h = float(rng.uniform(0.0, 3.0))
        rows.append([float(al), float(be), h, deformation.funeq_residual(al, be, h)])
    return Table(["alpha", "beta", "hbar", "residual"], rows)


def cmd_deform_chi(a, ctx):
    h, v = _floats(a.hbars), _floats(a.values)
    return Table(["hbar", "value", "chi"], list(zip(h, v, deformation.chi(h, v))))


def cmd_deform_beta(a, ctx):
    return {"value": deformation.beta_map(_witt(a.element), a.z)}


# --------------------------------------------------------------------------
# check


def cmd_check(a, ctx):
    only = a.only or None
    if only and any(n not in acceptance.CRITERIA for n in only):
        raise UsageError(f"criteria are numbered 1..{len(acceptance.CRITERIA)}")
    results = acceptance.run_all(ctx.seed, only)
    ctx.failed = not all(r.passed for r in results)
    if ctx.fmt == "csv":
        return Table(["criterion", "title", "passed", "detail", "seconds"],
                     [[r.number, r.title, r.passed, r.detail, f"{r.seconds:.3f}"] for r in results])
    ctx.raw = "".join(r.line() + "\n" for r in results)
    return None


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="arcperiods", description="Archimedean period rings: hyperfield, W-model, "
                "measure algebra, Mikusinski embedding and entropy deformation.",
                epilog=WITT_GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--tol", type=float, default=1e-9, help="numerical tolerance (default 1e-9)")
    p.add_argument("--precision", type=int, default=wa.PRECISION,
                   help="decimal digits for mpmath comparisons (default %(default)s)")
    p.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    p.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sub(parent, name, fn, help_):
        q = parent.add_parser(name, help=help_, description=help_)
        q.set_defaults(fn=fn)
        return q

    # hyper
    h = groups.add_parser("hyper", help="real tropical hyperfield").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    for name, fn, text in (("add", cmd_hyper_add, "hyper-sum x + y as a set"),
                           ("mul", cmd_hyper_mul, "product x * y"),
                           ("limit", cmd_hyper_limit, "naive pointwise limit sum")):
        q = sub(h, name, fn, text)
        q.add_argument("x")
        q.add_argument("y")
    q = sub(h, "deformed", cmd_hyper_deformed, "x +_{m,kappa} y, the deformed odd-power sum")
    q.add_argument("x")
    q.add_argument("y")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--kappa", required=True)
    q = sub(h, "grid", cmd_hyper_grid, "sample the deformed sum on a square grid")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--kappa", required=True)
    q.add_argument("--resolution", type=int, default=101)
    q.add_argument("--lo", type=float, default=-2.0)
    q.add_argument("--hi", type=float, default=2.0)
    q.add_argument("--out", help="write CSV here instead of printing the table")

    # witt
    w = groups.add_parser("witt", help="W-model over Q[R+*]", epilog=WITT_GRAMMAR,
                          formatter_class=argparse.RawDescriptionHelpFormatter).add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    for name, fn, text in (("rho", cmd_witt_rho, "residue map rho_W"),
                           ("theta", cmd_witt_theta, "theta(sum a[x]) = sum a x"),
                           ("parse", cmd_witt_parse, "print the WittElement JSON of a literal")):
        sub(w, name, fn, text).add_argument("element")
    q = sub(w, "frobenius", cmd_witt_frobenius, "Fr_lambda for rational lambda > 0")
    q.add_argument("--lambda", dest="lam", required=True)
    q.add_argument("element")
    q = sub(w, "jet", cmd_witt_jet, "jet of T_ell(X) at z = 1")
    q.add_argument("element")
    q.add_argument("--order", type=int, default=6)
    q.add_argument("--ell", default="log",
                   help="'log' or values of ell on the element's generators, comma separated")
    q = sub(w, "periods", cmd_witt_periods, "period matrix of pi_p against dual functionals")
    q.add_argument("primes", nargs="+")
    q = sub(w, "derive", cmd_witt_derive, "components of tau(n) - n in Ker/Ker^2")
    q.add_argument("n")
    q = sub(w, "entropy", cmd_witt_entropy, "entropy symbol s(x)")
    q.add_argument("x")

    # measure
    m = groups.add_parser("measure", help="exponential-polynomial measures (JSON files)").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    q = sub(m, "conv", cmd_measure_conv, "convolution of two measures")
    q.add_argument("first")
    q.add_argument("second")
    q = sub(m, "laplace", cmd_measure_laplace, "Laplace transform at z")
    q.add_argument("--z", required=True)
    q.add_argument("measure")
    sub(m, "epsilon", cmd_measure_epsilon, "augmentation (limit of z f(z))").add_argument("measure")
    q = sub(m, "norm", cmd_measure_norm, "total variation, or the rho-norm with --rho")
    q.add_argument("--rho", type=float, help="rho in (0, 1); omitted or 0 gives the total variation")
    q.add_argument("measure")
    q = sub(m, "decompose", cmd_measure_decompose, "canonical decomposition profile")
    q.add_argument("--tol", type=float, default=None)
    q.add_argument("measure")
    q = sub(m, "divide", cmd_measure_divide, "quotient by (z - z0) of a measure vanishing at z0")
    q.add_argument("--z0", required=True)
    q.add_argument("measure")
    q = sub(m, "frobenius", cmd_measure_frobenius, "Frobenius rescaling by lambda > 0")
    q.add_argument("--lambda", dest="lam", type=float, required=True)
    q.add_argument("measure")
    sub(m, "leading", cmd_measure_leading, "infimum of support and leading coefficient").add_argument("measure")
    sub(m, "embed", cmd_measure_embed, "measure of a Witt literal with positive generators").add_argument("element")

    # mikusinski
    k = groups.add_parser("mikusinski", help="Duhamel products and the embedding").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    q = sub(k, "embed", cmd_mik_embed, "distribution function F(t) = mu([0, t])")
    q.add_argument("measure")
    q.add_argument("--strict", action="store_true", help="reject atoms away from 0")
    q.add_argument("--samples", help="sample points; prints a table")
    q = sub(k, "duhamel", cmd_mik_duhamel, "Duhamel product of two embedded measures")
    q.add_argument("first")
    q.add_argument("second")
    q.add_argument("--samples", help="sample points; prints a table")

    # deform
    d = groups.add_parser("deform", help="entropy-deformed addition").add_subparsers(
        dest="cmd", required=True, parser_class=_Parser)
    q = sub(d, "sum", cmd_deform_sum, "deformed sum of positive values")
    q.add_argument("--hbar", type=float, required=True)
    q.add_argument("values", nargs="+")
    q = sub(d, "funeq", cmd_deform_funeq, "functional equation residuals at random samples")
    q.add_argument("--samples", type=int, default=10)
    q = sub(d, "chi", cmd_deform_chi, "chi(f)(hbar) = f(hbar)**(1/hbar) on a grid")
    q.add_argument("--hbars", required=True)
    q.add_argument("--values", required=True)
    q = sub(d, "beta", cmd_deform_beta, "beta(X)(z) for positive coefficients")
    q.add_argument("--z", type=float, required=True)
    q.add_argument("element")

    # check
    c = groups.add_parser("check", help="run the acceptance suite")
    c.add_argument("--only", type=int, nargs="*", help="criterion numbers")
    c.set_defaults(fn=cmd_check)
    return p


class _Context:
    def __init__(self, args):
        self.tol, self.precision, self.fmt, self.seed = args.tol, args.precision, args.fmt, args.seed
        self.failed = False
        self.raw: str | None = None


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.precision < 15:
            raise UsageError("--precision must be at least 15")
        ctx = _Context(args)
        result = args.fn(args, ctx)
        out.write(ctx.raw if ctx.raw is not None else render(result, ctx.fmt))
        return EXIT_FAIL if ctx.failed else EXIT_OK
    except UsageError as exc:
        err.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except PrecisionExhausted as exc:
        err.write(f"precision exhausted: {exc}\n")
        return EXIT_PRECISION
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        err.write(f"domain error: {exc}\n")
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
