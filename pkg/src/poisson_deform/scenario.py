"""
Scenario files: JSON documents describing one deformation run.

    {
      "name": "cubic",
      "dimension": 2,
      "order": 5,
      "sigma": [["z1^3 + z2^3 + 1"]],
      "potential_h": "z1*w2 + z2*w1",
      "checks": ["mc_residual", "beta_closure"],
      "echo_order": 2,
      "expected": {
        "phi": {"1": [{"vector": 1, "dzbar_indices": [1], "coefficient": "z1^3 + z2^3 + 1"}]},
        "beta": {"1": [{"dz_indices": [], "dzbar_indices": [1], "coefficient": "z2"}]}
      }
    }

``sigma`` is either the strict upper triangle (row i lists sigma^{ij} for
j > i) or the full antisymmetric n x n matrix.  Instead of
``potential_h`` a constant ``omega`` matrix may be given; then
h = sum z_j omega_{jk} w_k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from importlib import resources

from .algebra import AlgebraError, Poly, PolySyntaxError, format_poly, parse_poly
from .forms import FormError, MixedForm, TangentForm
from .poisson import IntegrabilityError, PoissonError, PoissonStructure
from .recursion import DeformationInput

ALL_CHECKS = (
    "mc_residual", "beta_closure", "frame_duality", "holomorphicity",
    "schouten_a", "omega_a", "ks_identity", "period_first_order",
    "rank_locus", "modular_invariance", "golden",
)
TWO_D_CHECKS = ("period_first_order", "rank_locus", "modular_invariance")
DEFAULT_ORDER = 4
MAX_ORDER = 12


class ScenarioError(ValueError):
    """Input error; ``line``/``column`` are 1-based when known."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = " (line %d, column %d)" % (line, column or 0)
        super().__init__(message + loc)
        self.line = line
        self.column = column


@dataclass
class Scenario:
    name: str
    n: int
    order: int
    sigma: PoissonStructure
    h: Poly
    checks: tuple
    echo_order: int = 2
    expected_phi: dict = field(default_factory=dict)    # k -> TangentForm
    expected_beta: dict = field(default_factory=dict)   # k -> MixedForm

    def deformation_input(self) -> DeformationInput:
        return DeformationInput(self.sigma, self.h, self.order)


def _poly(text, n, where):
    if not isinstance(text, str):
        if isinstance(text, int) and not isinstance(text, bool):
            text = str(text)
        else:
            raise ScenarioError("%s: polynomial must be a string" % where)
    try:
        return parse_poly(text, n)
    except PolySyntaxError as exc:
        raise ScenarioError("%s: %s" % (where, exc))


def _parse_sigma(raw, n):
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise ScenarioError("sigma must be a list of rows")
    full = len(raw) == n and all(len(r) == n for r in raw)
    upper = {}
    if full:
        m = [[_poly(c, n, "sigma[%d][%d]" % (i + 1, j + 1)) for j, c in enumerate(r)]
             for i, r in enumerate(raw)]
        for i in range(n):
            for j in range(n):
                if not m[i][j].is_holomorphic():
                    raise ScenarioError("sigma must be holomorphic: entry (%d,%d) contains w-variables" % (i + 1, j + 1))
        return PoissonStructure(n, m)
    if len(raw) not in (n - 1, n) or any(len(raw[i]) != n - 1 - i for i in range(len(raw)) if i < n - 1):
        raise ScenarioError("sigma must be the %dx%d matrix or its strict upper triangle" % (n, n))
    for i in range(min(len(raw), n - 1)):
        for k, c in enumerate(raw[i]):
            j = i + 1 + k
            p = _poly(c, n, "sigma[%d][%d]" % (i + 1, j + 1))
            if not p.is_holomorphic():
                raise ScenarioError("sigma must be holomorphic: entry (%d,%d) contains w-variables" % (i + 1, j + 1))
            upper[(i + 1, j + 1)] = p
    return PoissonStructure.from_upper(n, upper)


def _parse_form_literal(entries, n, where):
    terms = []
    if not isinstance(entries, list):
        raise ScenarioError("%s: form literal must be a list" % where)
    for e in entries:
        try:
            I = tuple(e.get("dz_indices", ()))
            J = tuple(e.get("dzbar_indices", ()))
            c = _poly(e["coefficient"], n, where)
        except (AttributeError, KeyError, TypeError):
            raise ScenarioError("%s: entries need dz_indices, dzbar_indices, coefficient" % where)
        terms.append((I, J, c))
    try:
        return MixedForm.from_terms(n, terms)
    except (FormError, AlgebraError) as exc:
        raise ScenarioError("%s: %s" % (where, exc))


def _parse_tangent_literal(entries, n, where):
    terms = []
    if not isinstance(entries, list):
        raise ScenarioError("%s: tangent literal must be a list" % where)
    for e in entries:
        try:
            i = int(e["vector"])
            J = tuple(e.get("dzbar_indices", ()))
            c = _poly(e["coefficient"], n, where)
        except (AttributeError, KeyError, TypeError, ValueError):
            raise ScenarioError("%s: entries need vector, dzbar_indices, coefficient" % where)
        if len(J) != 1:
            raise ScenarioError("%s: phi components carry exactly one dzbar index" % where)
        terms.append((i, J, c))
    try:
        return TangentForm.from_terms(n, 1, terms)
    except (FormError, AlgebraError) as exc:
        raise ScenarioError("%s: %s" % (where, exc))


def scenario_from_dict(d: dict, order=None, checks=None, echo_order=None,
                       max_order=MAX_ORDER) -> Scenario:
    if not isinstance(d, dict):
        raise ScenarioError("scenario must be a JSON object")
    known = {"name", "dimension", "order", "sigma", "potential_h", "omega",
             "checks", "echo_order", "expected"}
    extra = set(d) - known
    if extra:
        raise ScenarioError("unknown field(s): %s" % ", ".join(sorted(extra)))
    name = str(d.get("name", "scenario"))
    n = d.get("dimension")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ScenarioError("dimension must be an integer >= 1")
    N = order if order is not None else d.get("order", DEFAULT_ORDER)
    if not isinstance(N, int) or isinstance(N, bool) or N < 1:
        raise ScenarioError("order must be an integer >= 1")
    if N > max_order:
        raise ScenarioError("order %d exceeds the cap %d" % (N, max_order))
    if "sigma" not in d:
        raise ScenarioError("missing field: sigma")
    try:
        sigma = _parse_sigma(d["sigma"], n)
    except PoissonError as exc:
        raise ScenarioError(str(exc)) from exc
    if ("potential_h" in d) == ("omega" in d):
        raise ScenarioError("give exactly one of potential_h, omega")
    if "potential_h" in d:
        h = _poly(d["potential_h"], n, "potential_h")
    else:
        om = d["omega"]
        if not isinstance(om, list) or len(om) != n or any(not isinstance(r, list) or len(r) != n for r in om):
            raise ScenarioError("omega must be an %dx%d matrix" % (n, n))
        mat = []
        for j, row in enumerate(om):
            mrow = []
            for k, c in enumerate(row):
                p = _poly(c, n, "omega[%d][%d]" % (j + 1, k + 1))
                if p.degree() > 0:
                    raise ScenarioError("omega entries must be constants")
                mrow.append(p.constant_term())
            mat.append(mrow)
        h = DeformationInput.from_constant_omega(sigma, mat, N).h

    expected = d.get("expected", {}) or {}
    exp_phi, exp_beta = {}, {}
    if not isinstance(expected, dict) or set(expected) - {"phi", "beta"}:
        raise ScenarioError("expected must be an object with phi and/or beta")
    for k, lit in (expected.get("phi") or {}).items():
        exp_phi[int(k)] = _parse_tangent_literal(lit, n, "expected.phi.%s" % k)
    for k, lit in (expected.get("beta") or {}).items():
        exp_beta[int(k)] = _parse_form_literal(lit, n, "expected.beta.%s" % k)

    requested = checks if checks is not None else d.get("checks")
    if requested is None:
        requested = [c for c in ALL_CHECKS if c != "golden" or exp_phi or exp_beta]
        # surface checks need n = 2 and sigma^{12} not identically zero
        planar = n == 2 and bool(sigma.entry(1, 2))
        requested = [c for c in requested if planar or c not in TWO_D_CHECKS]
    requested = list(requested)
    for c in requested:
        if c not in ALL_CHECKS:
            raise ScenarioError("unknown check %r" % c)
        if c in TWO_D_CHECKS and n != 2:
            raise ScenarioError("check %s needs dimension 2 (scenario has %d)" % (c, n))
    checks_t = tuple(c for c in ALL_CHECKS if c in requested)
    eo = echo_order if echo_order is not None else d.get("echo_order", 2)
    if not isinstance(eo, int) or eo < 0:
        raise ScenarioError("echo_order must be a nonnegative integer")
    return Scenario(name, n, N, sigma, h, checks_t, eo, exp_phi, exp_beta)


def parse_scenario(text: str, **overrides) -> Scenario:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("syntax error: %s" % exc.msg, exc.lineno, exc.colno)
    return scenario_from_dict(d, **overrides)


def _form_literal(f: MixedForm):
    return [{"dz_indices": list(I), "dzbar_indices": list(J), "coefficient": format_poly(c)}
            for (I, J), c in sorted(f.components.items())]


def _tangent_literal(f: TangentForm):
    return [{"vector": i, "dzbar_indices": list(J), "coefficient": format_poly(c)}
            for (i, J), c in sorted(f.components.items())]


def scenario_to_dict(s: Scenario) -> dict:
    n = s.n
    d = {
        "name": s.name,
        "dimension": n,
        "order": s.order,
        "sigma": [[format_poly(s.sigma.entry(i, j)) for j in range(i + 1, n + 1)] for i in range(1, n)],
        "potential_h": format_poly(s.h),
        "checks": list(s.checks),
        "echo_order": s.echo_order,
    }
    if s.expected_phi or s.expected_beta:
        d["expected"] = {}
        if s.expected_phi:
            d["expected"]["phi"] = {str(k): _tangent_literal(v) for k, v in sorted(s.expected_phi.items())}
        if s.expected_beta:
            d["expected"]["beta"] = {str(k): _form_literal(v) for k, v in sorted(s.expected_beta.items())}
    return d


def print_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


def _flip_term(p: Poly, e) -> Poly:
    terms = dict(p.terms)
    terms[e] = -terms[e]
    return Poly(p.n, terms)


def sign_mutations(s: Scenario):
    """Yield (label, scenario) for every single-term sign flip in h and in
    the upper triangle of sigma.  Expected values are kept, so the golden
    check sees the change."""
    for e, _ in s.h.sorted_terms():
        yield ("h term %s" % format_poly(Poly(s.n, {e: s.h.terms[e]})),
               replace(s, h=_flip_term(s.h, e)))
    for i in range(1, s.n + 1):
        for j in range(i + 1, s.n + 1):
            p = s.sigma.entry(i, j)
            for e, _ in p.sorted_terms():
                upper = {(a, b): s.sigma.entry(a, b) for a in range(1, s.n + 1)
                         for b in range(a + 1, s.n + 1)}
                upper[(i, j)] = _flip_term(p, e)
                try:
                    sig = PoissonStructure.from_upper(s.n, upper)
                except IntegrabilityError:
                    continue
                label = "sigma^{%d%d} term %s" % (i, j, format_poly(Poly(s.n, {e: p.terms[e]})))
                yield label, replace(s, sigma=sig)


# -- bundled fixtures ----------------------------------------------------------------

FIXTURES = ("flat", "cubic", "heisenberg3")


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise ScenarioError("unknown fixture %r (have: %s)" % (name, ", ".join(FIXTURES)))
    return resources.files("poisson_deform").joinpath("fixtures", name + ".json").read_text()


def load_fixture(name: str, **overrides) -> Scenario:
    return parse_scenario(fixture_text(name), **overrides)
