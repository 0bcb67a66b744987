from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from poisson_deform.algebra import (AlgebraError, DimensionError, GaussianRational,
                                    OrderMismatch, Poly, PolySyntaxError, SeriesMatrix,
                                    TSeries, conjugate, differentiate, format_poly,
                                    matrix_series_invert, parse_poly, poly_arith,
                                    series_invert)

from strategies import polys

P = lambda s, n=2: parse_poly(s, n)


def test_arith_examples():
    assert poly_arith(P("z1 + w1"), P("z1 - w1"), "add") == P("2*z1")
    assert poly_arith(P("z1"), P("z2"), "mul") == P("z1*z2")
    assert poly_arith(P("z1 + z2"), P("z1 - z2"), "mul") == P("z1^2 - z2^2")
    assert poly_arith(P("z1"), P("z1"), "sub") == Poly.zero(2)


def test_differentiate_examples():
    assert differentiate(P("z1^2*w2"), "z1") == P("2*z1*w2")
    assert differentiate(P("z1^2*w2"), "w2") == P("z1^2")
    assert differentiate(P("z1^3 + w1"), "z2") == Poly.zero(2)


def test_conjugate_examples():
    assert conjugate(P("i*z1")) == P("-i*w1")
    assert conjugate(P("z1*w2")) == P("w1*z2")


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        P("z1") + P("z1", 3)


@pytest.mark.parametrize("text, printed", [
    ("3/2*z1^3 - i*z2*w1", "3/2*z1^3 - i*z2*w1"),
    ("w1 + z1", "w1 + z1"),
    ("(1+2*i)*z1*z2", "(1+2*i)*z1*z2"),
    ("0", "0"),
    ("  - z2 ", "-z2"),
])
def test_print_parse(text, printed):
    p = P(text)
    assert format_poly(p) == printed
    assert P(format_poly(p)) == p


def test_parse_error_has_column():
    with pytest.raises(PolySyntaxError) as exc:
        P("z1 + * z2")
    assert exc.value.pos == 5
    with pytest.raises(PolySyntaxError):
        P("z3")
    with pytest.raises(PolySyntaxError):
        P("1/0")


def test_gaussian_rational():
    a = GaussianRational(Fraction(1, 2), 1)
    assert a * a.conjugate() == GaussianRational(Fraction(5, 4))
    assert (a / a) == GaussianRational(1)
    with pytest.raises(ZeroDivisionError):
        a / GaussianRational(0)


def test_series_examples():
    n, N = 2, 2
    s = TSeries(n, N, [Poly.const(n, 1), -P("z1")])
    assert series_invert(s) == TSeries(n, N, [Poly.const(n, 1), P("z1"), P("z1^2")])
    one = TSeries.one(n, 3)
    assert series_invert(one) == one
    with pytest.raises(AlgebraError):
        series_invert(TSeries(n, 2, [P("z1")]))


def test_order_mismatch():
    with pytest.raises(OrderMismatch):
        TSeries.one(2, 2) + TSeries.one(2, 3)


def test_t_derivative_drops_top():
    s = TSeries(1, 2, [P("z1", 1), P("z1", 1), P("z1", 1)])
    assert s.t_derivative() == TSeries(1, 2, [P("z1", 1), P("2*z1", 1)])


def test_matrix_invert_examples():
    n = 2
    I = SeriesMatrix.identity(n, 1, 2)
    assert matrix_series_invert(I) == I
    A = [[P("z1"), P("w2")], [P("1"), P("z1*z2")]]
    M = SeriesMatrix([[TSeries(n, 1, [Poly.const(n, int(i == j)), A[i][j]]) for j in range(2)] for i in range(2)])
    minus = SeriesMatrix([[TSeries(n, 1, [Poly.const(n, int(i == j)), -A[i][j]]) for j in range(2)] for i in range(2)])
    assert matrix_series_invert(M) == minus


def test_matrix_invert_requires_identity_leading_term():
    n = 1
    M = SeriesMatrix([[TSeries(n, 2, [Poly.const(n, 2)])]])
    with pytest.raises(AlgebraError):
        matrix_series_invert(M)


# -- ring axioms and involutions ----------------------------------------------

@settings(max_examples=200, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == Poly.zero(2)


@settings(max_examples=200, deadline=None)
@given(polys(), polys())
def test_conjugation(a, b):
    assert a.conjugate().conjugate() == a
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()


@settings(max_examples=200, deadline=None)
@given(polys(), polys())
def test_derivation(a, b):
    for slot in range(4):
        assert (a * b).diff(slot) == a.diff(slot) * b + a * b.diff(slot)


@settings(max_examples=200, deadline=None)
@given(polys())
def test_print_parse_roundtrip(a):
    assert parse_poly(format_poly(a), 2) == a


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 6), st.lists(polys(max_deg=1, max_terms=2), min_size=6, max_size=6))
def test_series_inversion(N, cs):
    s = TSeries(2, N, [Poly.const(2, 1)] + cs[:N])
    assert s * series_invert(s) == TSeries.one(2, N)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 4), st.lists(polys(max_deg=1, max_terms=2), min_size=16, max_size=16))
def test_matrix_inversion(N, cs):
    n = 2
    it = iter(cs)
    M = SeriesMatrix([[TSeries(n, N, [Poly.const(n, int(i == j))] + [next(it) for _ in range(N)])
                       for j in range(2)] for i in range(2)])
    I = SeriesMatrix.identity(n, 2, N)
    assert M * matrix_series_invert(M) == I
    assert matrix_series_invert(M) * M == I
