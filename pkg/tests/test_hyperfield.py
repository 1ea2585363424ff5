from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from arcperiods import DomainError
from arcperiods.hyperfield import (
    HyperSet, PerfectionSeq, deformed_add, graph_grid, grid_to_csv, hyper_add, hyper_add_sets,
    hyper_mul, in_compact_subring, naive_limit_add, sign_add, sign_projection, theta_lambda,
    theta_lambda_set,
)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=7)


def grid_union(A, B, n=81):
    """Oracle: sample both sets densely and collect pointwise hyper sums."""
    def samples(S):
        out = []
        for lo, hi in S.intervals:
            out += [lo + (hi - lo) * F(i, n - 1) for i in range(n)] if lo != hi else [lo]
        return out
    pts = set()
    for a in samples(A):
        for b in samples(B):
            for lo, hi in hyper_add(a, b).intervals:
                pts.update((lo, hi))
    return min(pts), max(pts)


class TestHyperAdd:
    def test_dominant(self):
        assert hyper_add(2, 3) == HyperSet.point(3)

    def test_idempotent(self):
        assert hyper_add(7, 7) == HyperSet.point(7)

    def test_antidiagonal(self):
        assert hyper_add(5, -5) == HyperSet.interval(-5, 5)

    def test_sets_left(self):
        assert hyper_add_sets(hyper_add(2, 3), HyperSet.point(-3)) == HyperSet.interval(-3, 3)

    def test_sets_right(self):
        assert hyper_add_sets(HyperSet.point(2), hyper_add(3, -3)) == HyperSet.interval(-3, 3)

    def test_zero_neutral(self):
        assert hyper_add_sets(HyperSet.point(0), HyperSet.point(F(-4, 3))) == HyperSet.point(F(-4, 3))

    def test_sets_against_sampling(self):
        A = HyperSet.interval(-2, 1) | HyperSet.point(5)
        B = HyperSet.interval(F(1, 2), 3)
        S = hyper_add_sets(A, B)
        lo, hi = grid_union(A, B)
        assert (S.intervals[0][0], S.intervals[-1][1]) == (lo, hi)

    def test_exact_rational_path(self):
        S = hyper_add(F(1, 3), F(-1, 3))
        assert S.exact and S.intervals == ((F(-1, 3), F(1, 3)),)

    def test_json_roundtrip(self):
        S = HyperSet.interval(F(-7, 3), F(1, 2)) | HyperSet.point(9)
        assert HyperSet.from_json(S.to_json()) == S

    @settings(max_examples=300, deadline=None)
    @given(rationals, rationals, rationals)
    def test_associative(self, a, b, c):
        left = hyper_add_sets(hyper_add(a, b), HyperSet.point(c))
        right = hyper_add_sets(HyperSet.point(a), hyper_add(b, c))
        assert left == right

    @settings(max_examples=200, deadline=None)
    @given(rationals, rationals)
    def test_commutative_and_reversible(self, a, b):
        S = hyper_add(a, b)
        assert S == hyper_add(b, a)
        assert 0 in hyper_add(a, -a)
        for lo, hi in S.intervals:
            for c in {lo, hi, (lo + hi) / 2}:
                assert a in hyper_add(c, -b)

    @settings(max_examples=200, deadline=None)
    @given(rationals, rationals, rationals)
    def test_distributive(self, a, b, c):
        assert hyper_mul(HyperSet.point(c), hyper_add(a, b)) == hyper_add(c * a, c * b)


class TestMulAndTheta:
    def test_mul(self):
        assert hyper_mul(2, 3) == 6
        assert hyper_mul(-1, -1) == 1
        assert hyper_mul(HyperSet.of(-2, 2), HyperSet.point(3)) == HyperSet.of(-6, 6)

    def test_theta(self):
        assert theta_lambda(2, -3) == -9
        assert theta_lambda(1, F(5, 7)) == F(5, 7)
        assert theta_lambda(F(1, 3), 27) == 3

    def test_theta_bad(self):
        with pytest.raises(DomainError):
            theta_lambda(0, 2)

    def test_theta_composes(self):
        x = F(-8, 27)
        assert theta_lambda(F(1, 3), theta_lambda(3, x)) == x

    @settings(max_examples=100, deadline=None)
    @given(rationals, rationals)
    def test_theta_automorphism(self, a, b):
        lam = F(3)
        assert theta_lambda_set(lam, hyper_add(a, b)) == hyper_add(theta_lambda(lam, a), theta_lambda(lam, b))


class TestDeformation:
    def test_cube_root(self):
        assert deformed_add(1, 1, 1, F(1, 3)) == pytest.approx(2 ** (1 / 3), rel=1e-15)

    def test_m_zero(self):
        assert deformed_add(F(3, 2), -4, 0, F(1, 3)) == pytest.approx(-2.5)

    def test_antidiagonal_limit(self):
        assert abs(deformed_add(2, -2, 12, F(1, 3))) < 1e-12

    def test_large_m_no_overflow(self):
        assert deformed_add(3, 2, 400, F(1, 3)) == pytest.approx(3.0)

    def test_even_kappa_rejected(self):
        with pytest.raises(DomainError):
            deformed_add(1, 1, 1, F(1, 2))

    def test_naive_limit(self):
        assert naive_limit_add(2, 3) == 3
        assert naive_limit_add(4, 4) == 4
        assert naive_limit_add(3, -3) == 0

    def test_naive_not_associative(self):
        x, y = 5, 2
        assert naive_limit_add(naive_limit_add(y, x), -x) == 0
        assert naive_limit_add(y, naive_limit_add(x, -x)) == y

    def test_grid_small(self):
        rows = graph_grid(1, F(1, 3), (-1, 1), (-1, 1), 3)
        assert len(rows) == 9
        for x, y, v in rows:
            assert v == deformed_add(x, y, 1, F(1, 3))

    def test_grid_m0(self):
        for x, y, v in graph_grid(0, F(1, 3), resolution=5):
            assert v == pytest.approx(x + y)

    def test_grid_converges_off_antidiagonal(self):
        def sup_dist(m):
            return max(abs(v - naive_limit_add(x, y)) for x, y, v in graph_grid(m, F(1, 3), resolution=41)
                       if abs(abs(x) - abs(y)) > 0.2)
        d = [sup_dist(m) for m in (1, 2, 4, 6)]
        assert all(a > b for a, b in zip(d, d[1:]))

    def test_csv_header(self):
        text = grid_to_csv([(0.0, 1.0, 1.0)])
        assert text.splitlines() == ["x,y,value", "0,1,1"]


class TestPerfectionAndSigns:
    def test_perfection(self):
        seq = PerfectionSeq(-2, F(1, 3))
        assert seq.term(0) == -2
        assert seq.term(1) == pytest.approx(-8)
        assert seq.check()

    def test_sign_hyperfield(self):
        assert sign_add(1, -1) == {-1, 0, 1}
        assert sign_add(0, -1) == {-1}
        assert sign_add(1, 1) == {1}

    def test_compact_subring(self):
        assert in_compact_subring(F(-1)) and not in_compact_subring(F(3, 2))
        assert sign_projection(F(1, 2)) == 0 and sign_projection(-1) == -1
        for a in (F(-1), F(1, 3), F(1)):
            for b in (F(-1, 2), F(1)):
                S = hyper_add(a, b)
                assert all(in_compact_subring(lo) and in_compact_subring(hi) for lo, hi in S.intervals)
                assert in_compact_subring(a * b)
        assert abs(F(11, 10) ** 200) > 10 ** 8
