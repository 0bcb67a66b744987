"""Run a scenario through the recursion and the selected checks."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from .algebra import AlgebraError, TSeries, format_poly
from .forms import format_form, format_tangent
from .geometry import (GeometryError, Residual, build_frame, frame_duality_residual,
                       holomorphicity_residual, ks_identity_residual,
                       modular_invariance, omega_a, period_first_order,
                       rank_locus_residual, schouten_residual, sigma_a_components,
                       summarize)
from .recursion import (RecursionError, beta_closure_check, first_order_matches,
                        phi_matches_sigma_del_beta, run_recursion)
from .scenario import Scenario


@dataclass
class CheckResult:
    name: str
    passed: bool
    first_failing_order: int | None = None
    valid_through: int | None = None
    terms: int = 0
    max_degree: int = -1
    witness: str | None = None
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "first_failing_order": self.first_failing_order,
            "valid_through": self.valid_through,
            "terms": self.terms,
            "max_degree": self.max_degree,
            "witness": self.witness,
            "detail": {k: _plain(v) for k, v in sorted(self.detail.items())},
        }


@dataclass
class Report:
    scenario: str
    dimension: int
    order: int
    checks: list
    echo: dict = field(default_factory=dict)
    error: str | None = None
    timings: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.error is None and all(c.passed for c in self.checks)

    def as_dict(self, timing=False):
        d = {
            "scenario": self.scenario,
            "dimension": self.dimension,
            "order": self.order,
            "status": "pass" if self.passed else "fail",
            "checks": [c.as_dict() for c in self.checks],
            "echo": self.echo,
        }
        if self.error is not None:
            d["error"] = self.error
        if timing:
            d["timings"] = {k: round(v, 6) for k, v in sorted(self.timings.items())}
        return d


def _plain(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    if isinstance(v, TSeries):
        return [format_poly(c) for c in v.coeffs]
    return str(v)


def _from_residual(r: Residual, name=None) -> CheckResult:
    return CheckResult(name or r.name, r.passed, r.failing_order, r.valid_through,
                       r.terms, r.max_degree, r.witness, dict(r.detail))


def _merge(name, parts, extra_ok=True, detail=None) -> CheckResult:
    """Combine several residuals; the earliest failing one sets the fields."""
    failing = [p for p in parts if not p.passed]
    if not failing:
        c = CheckResult(name, extra_ok)
        c.valid_through = min((p.valid_through for p in parts if p.valid_through is not None), default=None)
    else:
        first = min(failing, key=lambda p: (p.failing_order if p.failing_order is not None else 10 ** 9))
        c = _from_residual(first, name)
        c.passed = False
    c.detail.update({p.name: p.passed for p in parts})
    c.detail.update(detail or {})
    return c


def _golden(s: Scenario, result) -> CheckResult:
    bad = []
    for k, want in s.expected_phi.items():
        got = result.phis[k - 1] if k <= len(result.phis) else None
        if got != want:
            bad.append((k, "phi", got, want))
    for k, want in s.expected_beta.items():
        got = result.betas[k - 1] if k <= len(result.betas) else None
        if got != want:
            bad.append((k, "beta", got, want))
    if not bad:
        return CheckResult("golden", True, detail={"orders_compared": len(s.expected_phi) + len(s.expected_beta)})
    k, what, got, want = min(bad, key=lambda b: (b[0], b[1]))
    if got is None:
        witness = "%s_%d not computed (order %d)" % (what, k, s.order)
    else:
        diff = got - want
        fmt = format_tangent if what == "phi" else format_form
        witness = "%s_%d - expected = %s" % (what, k, fmt(diff))
    return CheckResult("golden", False, k, witness=witness, detail={"mismatches": len(bad)})


def run(s: Scenario) -> Report:
    rep = Report(s.name, s.n, s.order, [])
    t0 = time.perf_counter()
    try:
        result = run_recursion(s.deformation_input())
    except (RecursionError, AlgebraError) as exc:
        rep.error = "recursion failed: %s" % exc
        return rep
    rep.timings["recursion"] = time.perf_counter() - t0

    for k in range(1, min(s.echo_order, s.order) + 1):
        rep.echo.setdefault("beta", {})[str(k)] = format_form(result.betas[k - 1])
        rep.echo.setdefault("phi", {})[str(k)] = format_tangent(result.phis[k - 1])

    cache = {}

    def frame():
        if "frame" not in cache:
            cache["frame"] = build_frame(result.phi, s.order)
        return cache["frame"]

    def S():
        if "S" not in cache:
            cache["S"] = sigma_a_components(s.sigma, frame())
        return cache["S"]

    def om():
        if "om" not in cache:
            cache["om"] = omega_a(result, frame())
        return cache["om"]

    for name in s.checks:
        t1 = time.perf_counter()
        try:
            rep.checks.append(_run_check(name, s, result, frame, S, om))
        except (GeometryError, AlgebraError) as exc:
            rep.checks.append(CheckResult(name, False, witness="error: %s" % exc))
        rep.timings[name] = time.perf_counter() - t1
    return rep


def _run_check(name, s, result, frame, S, om) -> CheckResult:
    if name == "mc_residual":
        r = summarize("mc_residual", result.residual.components.values())
        c = _from_residual(r)
        c.detail["phi_is_sigma_del_beta"] = phi_matches_sigma_del_beta(result)
        c.detail["first_order_is_sigma_of_omega"] = first_order_matches(result)
        c.passed = c.passed and c.detail["phi_is_sigma_del_beta"] and c.detail["first_order_is_sigma_of_omega"]
        return c
    if name == "beta_closure":
        cr = beta_closure_check(result)
        r1 = summarize("beta", cr.beta_residual.components.values(), cr.valid_beta_order)
        r2 = summarize("beta_dot", cr.beta_dot_residual.components.values(), cr.valid_beta_dot_order)
        return _merge("beta_closure", [r1, r2])
    if name == "frame_duality":
        return _from_residual(frame_duality_residual(frame()))
    if name == "holomorphicity":
        return _from_residual(holomorphicity_residual(s.sigma, frame()))
    if name == "schouten_a":
        return _from_residual(schouten_residual(S(), frame()), "schouten_a")
    if name == "omega_a":
        o = om()
        return _merge("omega_a", [o.dbar_a, o.pure_holomorphic, o.closed],
                      extra_ok=o.t0_matches_omega,
                      detail={"t0_matches_omega": o.t0_matches_omega})
    if name == "ks_identity":
        return _from_residual(ks_identity_residual(s.sigma, frame(), result, S(), om()))
    if name == "period_first_order":
        return _from_residual(period_first_order(s.sigma, frame(), S(), s.h))
    if name == "rank_locus":
        return _from_residual(rank_locus_residual(s.sigma, S()))
    if name == "modular_invariance":
        return _from_residual(modular_invariance(s.sigma, S()))
    if name == "golden":
        return _golden(s, result)
    raise ValueError("unknown check %r" % name)


# -- rendering -----------------------------------------------------------------

def emit_json(reports, timing=False) -> str:
    doc = {
        "status": "pass" if all(r.passed for r in reports) else "fail",
        "reports": [r.as_dict(timing) for r in reports],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit_text(reports, timing=True, verify_only=False) -> str:
    lines = []
    for r in reports:
        lines.append("scenario %s  (n=%d, order %d): %s"
                     % (r.scenario, r.dimension, r.order, "PASS" if r.passed else "FAIL"))
        if r.error:
            lines.append("  error: %s" % r.error)
        for c in r.checks:
            tail = ""
            if not c.passed:
                tail = "  first failing order %s, %d terms, max degree %d" % (
                    c.first_failing_order, c.terms, c.max_degree)
                if c.witness:
                    tail += "\n      witness: %s" % c.witness
            t = "  %8.3fs" % r.timings[c.name] if timing and c.name in r.timings else ""
            lines.append("  %-20s %s%s%s" % (c.name, "pass" if c.passed else "FAIL", t, tail))
        if not verify_only:
            for what in ("beta", "phi"):
                for k, v in sorted(r.echo.get(what, {}).items(), key=lambda kv: int(kv[0])):
                    lines.append("  %s_%s = %s" % (what, k, v))
        if timing and "recursion" in r.timings:
            lines.append("  recursion time %.3fs" % r.timings["recursion"])
    return "\n".join(lines) + "\n"


def emit(reports, fmt="text", timing=None, verify_only=False) -> str:
    if fmt == "json":
        if verify_only:
            for r in reports:
                r.echo = {}
        return emit_json(reports, bool(timing))
    return emit_text(reports, True if timing is None else timing, verify_only)
