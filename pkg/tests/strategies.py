"""Hypothesis strategies shared by the property suites."""

from fractions import Fraction

from hypothesis import strategies as st

from poisson_deform.algebra import GaussianRational, Poly
from poisson_deform.forms import MixedForm

SMALL = st.integers(-3, 3)


@st.composite
def coefficients(draw, gaussian=True):
    re = Fraction(draw(SMALL), draw(st.integers(1, 3)))
    im = Fraction(draw(SMALL), draw(st.integers(1, 3))) if gaussian else 0
    return GaussianRational(re, im)


@st.composite
def polys(draw, n=2, max_deg=2, max_terms=4, holomorphic=False):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        z = [draw(st.integers(0, max_deg)) for _ in range(n)]
        w = [0] * n if holomorphic else [draw(st.integers(0, max_deg)) for _ in range(n)]
        terms[tuple(z + w)] = draw(coefficients())
    return Poly(n, terms)


@st.composite
def forms(draw, n=2, p=None, q=None, max_deg=2):
    """Random homogeneous form of bidegree (p, q); degrees drawn when None."""
    p = draw(st.integers(0, n)) if p is None else p
    q = draw(st.integers(0, n)) if q is None else q
    terms = []
    for _ in range(draw(st.integers(0, 3))):
        I = draw(st.permutations(range(1, n + 1)))[:p]
        J = draw(st.permutations(range(1, n + 1)))[:q]
        terms.append((tuple(I), tuple(J), draw(polys(n, max_deg))))
    return MixedForm.from_terms(n, terms)
