import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arcperiods import DomainError
from arcperiods.acceptance import rand_measure
from arcperiods.measure_algebra import INF, ExpPolyMeasure as M, convolve, iota
from arcperiods.mikusinski import MikFraction, PrimitiveFn, duhamel, ffm_extend, identity_fn, primitive, unit

T = np.array([0.3, 0.9, 1.7, 2.6, 4.1])


def test_primitives():
    assert np.allclose(primitive(M.atom(0.0)).__call__(T), 1)
    assert primitive(iota()) == identity_fn()
    assert np.allclose(identity_fn()(T), T)
    F = primitive(M.piece(0, INF, [(1, 0, 1)]))
    assert np.allclose(F(T), 1 - np.exp(-T), rtol=1e-14)


def test_strict_rejects_off_zero_atoms():
    with pytest.raises(DomainError):
        primitive(M.atom(1.0), strict=True)


def test_function_data_has_no_atoms():
    with pytest.raises(DomainError):
        PrimitiveFn(M.atom(0.0))


def test_duhamel_unit_and_square():
    assert duhamel(unit(), unit()) == unit()
    sq = duhamel(identity_fn(), identity_fn())
    assert sq == PrimitiveFn(M.piece(0, INF, [(0.5, 2, 0)]))
    assert np.allclose(sq(T), T**2 / 2, rtol=1e-15)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_homomorphism(seed):
    rng = np.random.default_rng(seed)
    a, b = rand_measure(rng, real=False), rand_measure(rng, real=False)
    a = M([(0.0, dict(a.atoms).get(0.0, 1.0))], a.pieces)
    b = M([(0.0, dict(b.atoms).get(0.0, 1.0))], b.pieces)
    lhs = duhamel(primitive(a, strict=True), primitive(b, strict=True))
    assert lhs.allclose(primitive(convolve(a, b)), tol=1e-8)


def test_ffm_extend():
    assert ffm_extend(M.atom(0.0)).equals(MikFraction.of(unit()))
    frac = ffm_extend(M.atom(1.0))
    assert np.allclose(frac.num(T), np.maximum(T - 1, 0))
    assert frac.den == identity_fn()
    assert ffm_extend(iota()).equals(MikFraction.of(identity_fn()))


def test_fraction_product_is_homomorphic():
    a = M.atom(0.4, 2.0) + M.piece(0, 2, [(1, 1, 0.5)])
    b = M.atom(1.1, -1.0) + M.piece(0.5, INF, [(3, 0, 2)])
    assert (ffm_extend(a) * ffm_extend(b)).equals(ffm_extend(convolve(a, b)))


def test_zero_denominator():
    with pytest.raises(DomainError):
        MikFraction(unit(), PrimitiveFn(M()))
