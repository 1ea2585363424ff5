import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arcperiods import DomainError
from arcperiods.deformation import (
    DeformedScalar, beta_map, chi, deformed_log_sum, deformed_sum, deformed_sum_many, entropy,
    funeq_residual, lift_log, w,
)
from arcperiods.witt_algebra import parse_witt, phi_eval

unit = st.floats(0.001, 0.999)
pos = st.floats(1e-3, 1e3)
hbar = st.floats(0.01, 5)


def test_entropy():
    assert entropy(0.5) == pytest.approx(math.log(2), rel=1e-15)
    assert entropy(1e-300) == pytest.approx(0, abs=1e-290)
    assert entropy(0.25) == entropy(0.75)
    for bad in (0, 1, -0.5):
        with pytest.raises(DomainError):
            entropy(bad)


def test_w():
    assert w(0.5, 1.7) == pytest.approx(2**1.7, rel=1e-15)
    assert w(0.3, 0.0) == 1
    assert w(0.2, 2.0) == pytest.approx(w(0.8, 2.0), rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(unit, unit, st.floats(0, 3))
def test_funeq(a, b, h):
    assert abs(funeq_residual(a, b, h)) < 1e-12 * max(1.0, w(a, h) * w(b, h) ** a)


def test_funeq_examples():
    assert abs(funeq_residual(0.5, 0.5, 1)) < 1e-12
    assert funeq_residual(0.3, 0.6, 0) == 0


def test_deformed_sum():
    assert deformed_sum(1, 1, 0.7) == pytest.approx(2**0.7, rel=1e-15)
    assert deformed_sum(2.5, 4, 1) == pytest.approx(6.5, rel=1e-15)
    assert deformed_sum(2.5, 4, 1e-3) == pytest.approx(4, rel=1e-6)
    assert deformed_sum(3, 3, 1e-12) == pytest.approx(3)
    with pytest.raises(DomainError):
        deformed_sum(-1, 2, 1)


def test_n_fold_unit_sum():
    for n in (2, 5, 100):
        for h in (0.1, 1.0, 3.0):
            assert deformed_log_sum([0.0] * n, h) == pytest.approx(h * math.log(n), rel=1e-15)
            assert deformed_sum_many([1.0] * n, h) == pytest.approx(n**h, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(pos, pos, pos, hbar)
def test_associative_commutative(x, y, z, h):
    s = lambda a, b: deformed_sum(a, b, h)
    assert s(x, y) == pytest.approx(s(y, x), rel=1e-12)
    assert s(s(x, y), z) == pytest.approx(s(x, s(y, z)), rel=1e-12)


def test_scalars():
    a, b = DeformedScalar(2.0, 0.5), DeformedScalar(3.0, 0.5)
    assert (a + b).value == pytest.approx(deformed_sum(2, 3, 0.5))
    assert (a * b).value == 6
    with pytest.raises(DomainError):
        a + DeformedScalar(1.0, 0.3)


def test_chi():
    h = np.array([0.2, 0.5, 1.0, 2.0])
    assert np.allclose(chi(h, 7.0**h), 7.0)
    assert np.allclose(chi(h, np.full(4, 3.0)), 3.0 ** (1 / h))
    assert np.allclose(chi(h, np.ones(4)), 1.0)
    with pytest.raises(DomainError):
        chi(h, -np.ones(4))


def test_chi_homomorphism():
    h = np.linspace(0.1, 2, 9)
    f, g = 2.0**h, 5.0**h * 0.5**h
    summed = np.array([deformed_sum(a, b, t) for a, b, t in zip(f, g, h)])
    assert np.allclose(chi(h, summed), chi(h, f) + chi(h, g), rtol=1e-10)


def test_beta_map():
    assert beta_map(parse_witt("[2]"), 3) == pytest.approx(8, rel=1e-15)
    assert beta_map(parse_witt("5/2[1]"), 1.3) == pytest.approx(2.5, rel=1e-15)
    X = parse_witt("2[3]+1/3[1/2]+[5/7]")
    for z in (0.5, 1.0, 2.0, 3.7):
        assert beta_map(X, z) == pytest.approx(phi_eval(X, z).real, rel=1e-12)
        assert math.exp(lift_log(X, 1 / z) * z) == pytest.approx(beta_map(X, z), rel=1e-12)
    with pytest.raises(DomainError):
        beta_map(parse_witt("[2]-[3]"), 1)
