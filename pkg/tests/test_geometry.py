import pytest

from poisson_deform.algebra import Poly, TSeries, parse_poly
from poisson_deform.forms import MixedForm
from poisson_deform.geometry import (GeometryError, LocalizedForm, build_frame,
                                     frame_duality_residual, holomorphicity_residual,
                                     inverse_two_form, ks_identity_residual,
                                     modular_invariance, omega_a, omega_a_mixed_cartan,
                                     period_first_order, rank_locus_factor,
                                     rank_locus_residual, schouten_residual,
                                     sigma_a_bivector, sigma_a_components)
from poisson_deform.recursion import run_recursion
from poisson_deform.scenario import load_fixture

P = lambda s, n=2: parse_poly(s, n)


class Setup:
    def __init__(self, name, order):
        self.scenario = load_fixture(name, order=order)
        self.sig = self.scenario.sigma
        self.result = run_recursion(self.scenario.deformation_input())
        self.frame = build_frame(self.result.phi, order)
        self.S = sigma_a_components(self.sig, self.frame)
        self.om = omega_a(self.result, self.frame)


@pytest.fixture(scope="module")
def flat():
    return Setup("flat", 6)


@pytest.fixture(scope="module")
def cubic():
    return Setup("cubic", 5)


@pytest.fixture(scope="module")
def heis():
    return Setup("heisenberg3", 3)


def series(n, N, *cs):
    return TSeries(n, N, [P(c, n) if isinstance(c, str) else Poly.const(n, c) for c in cs])


def test_flat_frame(flat):
    f = flat.frame
    # phi = t(d/dz1 dzbar2 - d/dz2 dzbar1): A = (1 + t^2)^{-1} I
    inv = series(2, 6, 1, 0, -1, 0, 1, 0, -1)
    assert f.inv_one_minus[0, 0] == inv and f.inv_one_minus[1, 1] == inv
    assert not f.inv_one_minus[0, 1]
    assert f.xi[0].t_coefficient(1) == MixedForm.dzbar(2, 2, P("-1"))
    assert f.xi[1].t_coefficient(1) == MixedForm.dzbar(2, 1, P("1"))


def test_flat_sigma_a(flat):
    # S_12 = (1 + t^2)^{-2}
    assert flat.S[0, 1] == series(2, 6, 1, 0, -2, 0, 3, 0, -4)


def test_frame_needs_order_for_zero_phi():
    from poisson_deform.forms import TangentForm
    with pytest.raises(GeometryError):
        build_frame(TangentForm(2, 1))
    f = build_frame(TangentForm(2, 1), 3)
    assert frame_duality_residual(f).passed


@pytest.mark.parametrize("name", ["flat", "cubic", "heis"])
def test_structural_checks(name, request):
    s = request.getfixturevalue(name)
    assert frame_duality_residual(s.frame).passed
    assert holomorphicity_residual(s.sig, s.frame).passed
    assert schouten_residual(s.S, s.frame).passed
    assert s.om.dbar_a.passed and s.om.pure_holomorphic.passed and s.om.closed.passed
    assert s.om.t0_matches_omega


def test_sigma_a_first_order_vanishes(cubic):
    for i in range(2):
        for j in range(2):
            assert not cubic.S[i, j].coeffs[1]


def test_sigma_a_bivector_antisymmetric(cubic):
    B = sigma_a_bivector(cubic.S, cubic.frame)
    assert B and all(a < b for a, b in B.components)


def test_flat_omega_a(flat):
    # X_1(beta'_1) = (d/dz1 - t d/dw2)(z1 - t w2) = 1 + t^2; constant in z, w
    w = series(2, 6, 1, 0, 1)
    assert flat.om.mixed == {(0, 0): w, (1, 1): w}


@pytest.mark.parametrize("name", ["flat", "cubic", "heis"])
def test_cartan_route_matches(name, request):
    s = request.getfixturevalue(name)
    N = s.frame.order
    cart = omega_a_mixed_cartan(s.result, s.frame)
    for key in set(cart) | set(s.om.mixed):
        a = cart.get(key, TSeries.zero(2 if name != "heis" else 3, N))
        b = s.om.mixed.get(key, a * 0)
        assert (a - b).truncate(N - 1).is_zero()


def test_ks_flat(flat):
    r = ks_identity_residual(flat.sig, flat.frame, flat.result, flat.S, flat.om)
    assert r.passed and r.detail["lemma_failing_order"] is None


def test_ks_cubic_reports_first_failing_order(cubic):
    # the frame-basis identity breaks at t^1 once sigma depends on z; the
    # bracket term sigma_a(d_a xibar, xi) is nonzero at that order
    r = ks_identity_residual(cubic.sig, cubic.frame, cubic.result, cubic.S, cubic.om)
    assert not r.passed
    assert r.failing_order == 1
    assert r.detail["lemma_failing_order"] == 1
    assert r.witness == "-3*z1*z2^3*w1^2 - 3*z1^4*w1^2 - 3*z1*w1^2"


def test_rank_locus(flat, cubic):
    assert rank_locus_factor(flat.sig, flat.S) == series(2, 6, 1, 0, -2, 0, 3, 0, -4)
    u = rank_locus_factor(cubic.sig, cubic.S)
    assert u.coeffs[0] == Poly.const(2, 1) and not u.coeffs[1]
    assert rank_locus_residual(cubic.sig, cubic.S).passed


def test_period(flat, cubic):
    for s in (flat, cubic):
        r = period_first_order(s.sig, s.frame, s.S, s.scenario.h)
        assert r.passed, r.detail
    inv = inverse_two_form(cubic.sig, cubic.frame, cubic.S)
    omega = MixedForm.from_terms(2, [((1,), (2,), P("1")), ((2,), (1,), P("1"))])
    assert inv.t_coefficient(1) == LocalizedForm(omega * -2, cubic.sig.entry(1, 2), 0)


def test_modular(flat, cubic):
    assert modular_invariance(flat.sig, flat.S).passed
    assert modular_invariance(cubic.sig, cubic.S).passed


def test_localized_form_reduce():
    p = P("z1 + 1")
    f = LocalizedForm(MixedForm.dz(2, 1, p * p), p, 3).reduce()
    assert f.power == 1 and f.numerator == MixedForm.dz(2, 1, Poly.const(2, 1))
