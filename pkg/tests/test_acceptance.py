"""Acceptance gate.  Each test prints one line

    criterion <k> PASS|FAIL  <summary>

to the terminal (outside pytest's capture) and then asserts."""

import os
import subprocess
import sys
import time

import pytest

from poisson_deform.forms import MixedForm, del_, delbar
from poisson_deform.geometry import (build_frame,
                                     holomorphicity_residual, ks_identity_residual,
                                     modular_invariance, omega_a, period_first_order,
                                     rank_locus_residual, schouten_residual,
                                     sigma_a_components, summarize)
from poisson_deform.poisson import contract_sigma_form
from poisson_deform.recursion import beta_closure_check, first_failing_order, run_recursion
from poisson_deform.report import run
from poisson_deform.scenario import FIXTURES, load_fixture, sign_mutations

HERE = os.path.dirname(os.path.abspath(__file__))


@pytest.fixture
def report(capsys):
    def emit(k, ok, summary):
        with capsys.disabled():
            print("\ncriterion %2d %s  %s" % (k, "PASS" if ok else "FAIL", summary))
        assert ok, summary
    return emit


class Geo:
    def __init__(self, name, order):
        t0 = time.perf_counter()
        self.s = load_fixture(name, order=order)
        self.r = run_recursion(self.s.deformation_input())
        self.recursion_time = time.perf_counter() - t0
        self.frame = build_frame(self.r.phi, order)
        self.S = sigma_a_components(self.s.sigma, self.frame)


_cache = {}


def geo(name, order):
    if (name, order) not in _cache:
        _cache[(name, order)] = Geo(name, order)
    return _cache[(name, order)]


def both():
    return [geo("flat", 6), geo("cubic", 5)]


def test_c01_flat_closed_form(report):
    t0 = time.perf_counter()
    s = load_fixture("flat", order=6)
    r = run_recursion(s.deformation_input())
    dt = time.perf_counter() - t0
    omega = del_(delbar(MixedForm.function(s.h)))
    ok = (r.phis[0] == contract_sigma_form(s.sigma, omega)
          and all(not p for p in r.phis[1:]) and r.residual.is_zero() and dt < 1.0)
    report(1, ok, "flat N=6: phi = t*sigma(omega), phi_k = 0 for k >= 2, residual 0, %.3fs" % dt)


def test_c02_cubic_mc_residual(report):
    t0 = time.perf_counter()
    g = geo("cubic", 5)
    # independent path: the deformed (0,1) fields must commute, since
    # [Xbar_j, Xbar_k] is the (j,k) component of dbar phi + 1/2 [phi, phi]
    comm = []
    for i in range(2):
        for j in range(i + 1, 2):
            comm.extend(g.frame.xbar[i].bracket(g.frame.xbar[j]).components.values())
    sub = summarize("commutator", comm)
    dt = time.perf_counter() - t0
    ok = g.r.residual.is_zero() and sub.passed and dt < 60 and all(g.r.phis[1:])
    report(2, ok, "cubic N=5: residual 0 (engine), frame commutators 0 (substitution), %.2fs" % dt)


def test_c03_beta_closure(report):
    lines, ok = [], True
    for name in ("flat", "cubic"):
        # N = 6 so that beta' is exact through t^5
        cr = beta_closure_check(run_recursion(load_fixture(name, order=6).deformation_input()))
        f1 = first_failing_order(cr.beta_residual, 5)
        f2 = first_failing_order(cr.beta_dot_residual, 5)
        ok &= f1 is None and f2 is None
        lines.append("%s: %s/%s" % (name, f1, f2))
    report(3, ok, "dbar beta = 1/2{beta,beta}, dbar beta' = {beta',beta} mod t^6; first failing " + ", ".join(lines))


def test_c04_holomorphicity(report):
    res = [holomorphicity_residual(g.s.sigma, g.frame) for g in both()]
    report(4, all(r.passed for r in res),
           "L_{Xbar_k} sigma = 0, all orders: " + ", ".join(str(r.failing_order) for r in res))


def test_c05_schouten(report):
    res = [schouten_residual(g.S, g.frame) for g in both()]
    report(5, all(r.passed for r in res),
           "[sigma_a, sigma_a] = 0 mod t^6: first failing %s" % [r.failing_order for r in res])


def test_c06_period(report):
    res = [period_first_order(g.s.sigma, g.frame, g.S, g.s.h) for g in both()]
    report(6, all(r.passed for r in res),
           "t^1 of inverse 2-form = -2 omega, t^1 of sigma_a(xi_i, xi_j) = 0: %s"
           % ", ".join("ok" if r.passed else "failed %s" % r.detail for r in res))


def test_c07_rank_locus(report):
    g = geo("cubic", 5)
    r = rank_locus_residual(g.s.sigma, g.S)
    u = r.detail.get("unit")
    report(7, r.passed and u is not None and u.order == 5,
           "sigma_a(xi_1, xi_2) = u * sigma^{12}, u a unit, orders 0..5: %s" % (r.witness or "ok"))


def test_c08_modular(report):
    res = [modular_invariance(g.s.sigma, g.S) for g in both()]
    report(8, all(r.passed for r in res), "t^1 of modular field of sigma_a(xi_1, xi_2) = 0")


def test_c09_ks_identity(report):
    lines, ok = [], True
    for name in ("flat", "cubic"):
        g = geo(name, 5)
        r = ks_identity_residual(g.s.sigma, g.frame, g.r, g.S, omega_a(g.r, g.frame))
        good = r.failing_order is None or r.failing_order >= 4
        ok &= good
        lines.append("%s: first failing order %s%s" % (
            name, r.failing_order, "" if good else " (witness %s)" % r.witness))
    report(9, ok, "sigma_a(omega_a) = KS expression mod t^4 at N=5; " + "; ".join(lines))


SUITES = [
    "test_forms.py::test_delbar_squared",
    "test_forms.py::test_homotopy_roundtrip",
    "test_poisson.py::test_bracket_axioms",
    "test_poisson.py::test_schouten_matches_jacobiator",
]


def test_c10_property_suites(report):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider"]
                          + [os.path.join(HERE, s) for s in SUITES],
                          capture_output=True, text=True, cwd=HERE)
    dt = time.perf_counter() - t0
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    report(10, proc.returncode == 0 and dt < 120, "200-case suites: %s, %.1fs" % (tail, dt))


def test_c11_mutation_sensitivity(report):
    checks = ["mc_residual", "beta_closure", "golden"]
    total, caught, missed = 0, 0, []
    for name in FIXTURES:
        s = load_fixture(name, checks=checks)
        for label, m in sign_mutations(s):
            total += 1
            failed = [c for c in run(m).checks if not c.passed and c.first_failing_order is not None]
            if failed:
                caught += 1
            else:
                missed.append("%s/%s" % (name, label))
    report(11, total > 0 and not missed,
           "%d/%d single-sign mutations flip a check with a named order%s"
           % (caught, total, "; missed " + ", ".join(missed) if missed else ""))
