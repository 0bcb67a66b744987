"""
Term-by-term solution of the Maurer-Cartan equation

    dbar phi + 1/2 [phi, phi] = 0,   phi(t) = sum_k t^k phi_k,

with phi_k = sigma(del beta_k), beta_1 = dbar h and, for k >= 2,

    gamma_k = sum_{i+j=k} {beta_i, beta_j},   2 dbar beta_k = gamma_k,

beta_k obtained from the explicit dbar-homotopy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import AlgebraError, Poly, TSeries
from .forms import (MixedForm, NotClosedError, TangentForm,
                    _add_into, delbar, delbar_tangent, dolbeault_homotopy,
                    tv_bracket)
from .poisson import PoissonStructure, bracket, contract_sigma_form, sigma_of_del

log = logging.getLogger(__name__)

# Every factor of the recursion lives here.  They are pinned by requiring
# the Maurer-Cartan residual to vanish identically (flat and cubic
# fixtures); flipping any one of them breaks that.
CONSTANTS = {
    # beta_k = BETA_FROM_GAMMA * K(gamma_k), i.e. gamma_k = 2 dbar beta_k
    "BETA_FROM_GAMMA": Fraction(1, 2),
    # dbar phi + MC_BRACKET * [phi, phi]
    "MC_BRACKET": Fraction(1, 2),
    # dbar beta = CLOSURE_BRACKET * {beta, beta}
    "CLOSURE_BRACKET": Fraction(1, 2),
}


class RecursionError(AlgebraError):
    def __init__(self, msg, order=None, residual=None):
        super().__init__(msg)
        self.order = order
        self.residual = residual


@dataclass(frozen=True)
class DeformationInput:
    sigma: PoissonStructure
    h: Poly
    order: int = 4

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.h.n != self.sigma.n:
            raise ValueError("potential and sigma have different dimensions")

    @property
    def n(self):
        return self.sigma.n

    @classmethod
    def from_constant_omega(cls, sigma, omega, order=4):
        """Synthesize h = sum_{j,k} z_j omega_{j k} w_k from a constant
        coefficient matrix omega (0-based rows j, columns k)."""
        n = sigma.n
        h = Poly.zero(n)
        for j in range(n):
            for k in range(n):
                c = omega[j][k]
                if c:
                    h = h + Poly.z(n, j + 1) * Poly.w(n, k + 1) * c
        return cls(sigma, h, order)


def beta_bracket(sig: PoissonStructure, a: MixedForm, b: MixedForm) -> MixedForm:
    """{a, b} = sum_{i,j} {a_i, b_j} dzbar_i ^ dzbar_j for (0,1)-forms."""
    out = {}
    for (_, (i,)), ai in a.components.items():
        for (_, (j,)), bj in b.components.items():
            if i == j:
                continue
            v = bracket(sig, ai, bj)
            if not v:
                continue
            if i < j:
                _add_into(out, ((), (i, j)), v)
            else:
                _add_into(out, ((), (j, i)), -v)
    return MixedForm(a.n, out)


def beta_one(inp: DeformationInput) -> MixedForm:
    return delbar(MixedForm.function(inp.h)) if inp.h else MixedForm(inp.n)


def gamma_n(sig: PoissonStructure, betas: list, k: int) -> MixedForm:
    """gamma_k from beta_1..beta_{k-1} (``betas[0]`` is beta_1)."""
    if k < 2:
        raise ValueError("gamma_k needs k >= 2")
    if len(betas) < k - 1:
        raise ValueError("need beta_1..beta_%d" % (k - 1))
    g = MixedForm(sig.n)
    for i in range(1, k):
        g = g + beta_bracket(sig, betas[i - 1], betas[k - i - 1])
    r = delbar(g)
    if r:
        raise RecursionError("dbar gamma_%d does not vanish" % k, order=k, residual=r)
    return g


def beta_n(gamma: MixedForm) -> MixedForm:
    try:
        return dolbeault_homotopy(gamma) * CONSTANTS["BETA_FROM_GAMMA"]
    except NotClosedError as exc:
        raise RecursionError(str(exc), residual=exc.residual)


def assemble_tangent(parts: list, order: int, n: int, q: int) -> TangentForm:
    """sum_k t^k parts[k-1] as a TangentForm with TSeries coefficients."""
    acc = {}
    for k, f in enumerate(parts, start=1):
        for key, c in f.components.items():
            _add_into(acc, key, TSeries.t_power(n, order, k, c))
    return TangentForm(n, q, acc)


def assemble_form(parts: list, order: int, n: int) -> MixedForm:
    acc = {}
    for k, f in enumerate(parts, start=1):
        for key, c in f.components.items():
            _add_into(acc, key, TSeries.t_power(n, order, k, c))
    return MixedForm(n, acc)


def mc_residual(phi: TangentForm) -> TangentForm:
    """dbar phi + 1/2 [phi, phi] for phi with series coefficients."""
    return delbar_tangent(phi) + tv_bracket(phi, phi) * CONSTANTS["MC_BRACKET"]


def first_failing_order(obj, upto=None):
    """Lowest t-order at which any coefficient of a form-like object with
    TSeries coefficients is nonzero; None when it vanishes identically."""
    comps = obj.components.values() if hasattr(obj, "components") else obj.values()
    best = None
    for c in comps:
        k = c.first_nonzero_order()
        if k is not None and (upto is None or k <= upto):
            best = k if best is None else min(best, k)
    return best


@dataclass
class DeformationResult:
    input: DeformationInput
    betas: list                     # beta_1..beta_N, Poly-coefficient (0,1)-forms
    phis: list                      # phi_1..phi_N, Poly-coefficient TangentForms
    gammas: list                    # gamma_2..gamma_N
    phi: TangentForm                # assembled series
    beta: MixedForm                 # assembled series
    residual: TangentForm
    timings: dict = field(default_factory=dict)

    @property
    def order(self):
        return self.input.order

    @property
    def sigma(self):
        return self.input.sigma

    @property
    def n(self):
        return self.input.n

    @property
    def ok(self):
        return self.residual.is_zero()

    def failing_order(self):
        return first_failing_order(self.residual)

    def beta_dot(self) -> MixedForm:
        """d beta / dt; exact through t^(N-1)."""
        return self.beta.map(TSeries.t_derivative)

    def phi_dot(self) -> TangentForm:
        return self.phi.map(TSeries.t_derivative)


def run_recursion(inp: DeformationInput) -> DeformationResult:
    import time

    sig, N, n = inp.sigma, inp.order, inp.n
    t0 = time.perf_counter()
    betas = [beta_one(inp)]
    gammas = []
    for k in range(2, N + 1):
        g = gamma_n(sig, betas, k)
        gammas.append(g)
        betas.append(beta_n(g))
        log.debug("order %d: gamma has %d components", k, len(g.components))
    phis = [sigma_of_del(sig, b) for b in betas]
    t1 = time.perf_counter()
    phi = assemble_tangent(phis, N, n, 1)
    beta = assemble_form(betas, N, n)
    residual = mc_residual(phi)
    t2 = time.perf_counter()
    return DeformationResult(inp, betas, phis, gammas, phi, beta, residual,
                             {"recursion": t1 - t0, "mc_residual": t2 - t1})


def phi_matches_sigma_del_beta(result: DeformationResult) -> bool:
    return all(p == sigma_of_del(result.sigma, b) for p, b in zip(result.phis, result.betas))


def first_order_matches(result: DeformationResult) -> bool:
    """phi_1 == sigma(del dbar h)."""
    from .forms import del_
    omega = del_(delbar(MixedForm.function(result.input.h))) if result.input.h else MixedForm(result.n)
    return result.phis[0] == contract_sigma_form(result.sigma, omega)


@dataclass
class ClosureReport:
    beta_residual: MixedForm        # dbar beta - 1/2 {beta, beta}
    beta_dot_residual: MixedForm    # dbar beta' - {beta', beta}
    beta_failing_order: int | None
    beta_dot_failing_order: int | None
    valid_beta_order: int           # residual meaningful through this t-order
    valid_beta_dot_order: int

    @property
    def ok(self):
        return self.beta_failing_order is None and self.beta_dot_failing_order is None


def beta_closure_check(result: DeformationResult) -> ClosureReport:
    sig, N = result.sigma, result.order
    B = result.beta
    r1 = delbar(B) - beta_bracket(sig, B, B) * CONSTANTS["CLOSURE_BRACKET"]
    Bd = result.beta_dot()
    r2 = delbar(Bd) - beta_bracket(sig, Bd, B)
    # the t^N coefficient of beta' needs beta_{N+1}; ignore it
    return ClosureReport(r1, r2, first_failing_order(r1), first_failing_order(r2, N - 1), N, N - 1)
