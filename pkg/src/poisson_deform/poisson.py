"""
Holomorphic Poisson structures on the polynomial local model.

Sign conventions, fixed once here:

* ``{f, g} = sum_{i,j} sigma^{ij} df/dz_i dg/dz_j`` (full double sum), so
  ``{z_1, z_2} = sigma^{12}``.
* ``hamiltonian(f)`` is the vector field X_f with ``X_f(g) = {f, g}``,
  i.e. ``X_f^j = sum_i sigma^{ij} df/dz_i``.
* Contracting sigma into the (1,0) slot of a form uses the index
  placement ``sigma(alpha)^i = sum_j sigma^{ij} alpha_j``.  On an exact
  form this gives ``sigma(df) = -X_f``; it is the placement used for the
  Kodaira-Spencer representative ``phi_1 = sigma^{ij} omega_{jk} d/dz_i dzbar_k``
  and everything downstream of it.
"""

from __future__ import annotations

import itertools

from .algebra import AlgebraError, DimensionError, Poly, TSeries, format_poly
from .forms import (CoordBivector, CoordVector, FormError, MixedForm,
                    TangentForm, _add_into, sort_sign)


class PoissonError(AlgebraError):
    pass


class IntegrabilityError(PoissonError):
    def __init__(self, triple, value):
        i, j, k = triple
        super().__init__("Jacobiator does not vanish on (z%d, z%d, z%d): %s"
                         % (i, j, k, format_poly(value)))
        self.triple = triple
        self.value = value


class PoissonStructure:
    """Antisymmetric holomorphic bivector sigma^{ij} (1-based in the API,
    stored 0-based)."""

    def __init__(self, n: int, matrix, check: bool = True):
        if n < 1:
            raise DimensionError("dimension must be positive")
        rows = [list(r) for r in matrix]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DimensionError("sigma must be %dx%d" % (n, n))
        for i in range(n):
            for j in range(n):
                c = rows[i][j]
                if not isinstance(c, Poly):
                    c = Poly.const(n, c)
                    rows[i][j] = c
                if c.n != n:
                    raise DimensionError("entry dimension mismatch")
                if not c.is_holomorphic():
                    raise PoissonError("sigma must be holomorphic: entry (%d,%d) = %s"
                                       % (i + 1, j + 1, format_poly(c)))
        for i in range(n):
            if rows[i][i]:
                raise PoissonError("sigma must be antisymmetric: nonzero diagonal entry %d" % (i + 1))
            for j in range(i + 1, n):
                if rows[i][j] != -rows[j][i]:
                    raise PoissonError("sigma must be antisymmetric: entries (%d,%d), (%d,%d)"
                                       % (i + 1, j + 1, j + 1, i + 1))
        self.n = n
        self.matrix = tuple(tuple(r) for r in rows)
        if check and n >= 3:
            bad = self.failing_triple()
            if bad is not None:
                raise IntegrabilityError(*bad)

    @classmethod
    def from_upper(cls, n, upper: dict, check=True):
        """``upper`` maps 1-based (i, j) with i < j to Poly."""
        zero = Poly.zero(n)
        m = [[zero] * n for _ in range(n)]
        for (i, j), p in upper.items():
            if not (1 <= i < j <= n):
                raise DimensionError("upper-triangular index (%d,%d) invalid" % (i, j))
            m[i - 1][j - 1] = p
            m[j - 1][i - 1] = -p
        return cls(n, m, check=check)

    @classmethod
    def zero(cls, n):
        return cls.from_upper(n, {})

    def entry(self, i, j):
        """sigma^{ij}, 1-based."""
        return self.matrix[i - 1][j - 1]

    def __eq__(self, other):
        return isinstance(other, PoissonStructure) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def is_zero(self):
        return all(not c for r in self.matrix for c in r)

    def failing_triple(self):
        n = self.n
        for i, j, k in itertools.combinations(range(1, n + 1), 3):
            v = jacobiator(self, Poly.z(n, i), Poly.z(n, j), Poly.z(n, k))
            if v:
                return (i, j, k), v
        return None

    def as_bivector(self, order=None) -> CoordBivector:
        """Embed sigma over the 2n coordinate directions."""
        comps = {}
        for i in range(self.n):
            for j in range(i + 1, self.n):
                c = self.matrix[i][j]
                if c:
                    comps[(i, j)] = c if order is None else TSeries.const(c, order)
        return CoordBivector(self.n, comps)

    def __repr__(self):
        return "PoissonStructure(%d, %r)" % (self.n, [[format_poly(c) for c in r] for r in self.matrix])


def _check_dim(sig, *fs):
    for f in fs:
        if f.n != sig.n:
            raise DimensionError("dimension mismatch")


def bracket(sig: PoissonStructure, f, g):
    """{f, g}; w-variables (and t) are constants."""
    _check_dim(sig, f, g)
    n = sig.n
    dg = [g.dz(j) for j in range(1, n + 1)]
    acc = f * 0
    for i in range(n):
        dfi = f.dz(i + 1)
        if not dfi:
            continue
        row = sig.matrix[i]
        inner = None
        for j in range(n):
            if row[j] and dg[j]:
                term = dg[j] * row[j]
                inner = term if inner is None else inner + term
        if inner is not None:
            acc = acc + dfi * inner
    return acc


def hamiltonian(sig: PoissonStructure, f) -> TangentForm:
    """X_f with X_f(g) = {f, g}."""
    _check_dim(sig, f)
    n = sig.n
    df = [f.dz(i) for i in range(1, n + 1)]
    comps = {}
    for j in range(n):
        acc = None
        for i in range(n):
            if sig.matrix[i][j] and df[i]:
                term = df[i] * sig.matrix[i][j]
                acc = term if acc is None else acc + term
        if acc:
            comps[(j + 1, ())] = acc
    return TangentForm(n, 0, comps)


def sigma_sharp(sig: PoissonStructure, alpha):
    """Contraction of a (1,0) covector alpha (list of n coefficients, 0-based)
    into sigma: returns the list v with v_i = sum_j sigma^{ij} alpha_j."""
    n = sig.n
    out = []
    for i in range(n):
        acc = None
        for j in range(n):
            if sig.matrix[i][j] and alpha[j]:
                term = alpha[j] * sig.matrix[i][j]
                acc = term if acc is None else acc + term
        out.append(acc)
    return out


def jacobiator(sig: PoissonStructure, f, g, h):
    """{f,{g,h}} + {h,{f,g}} + {g,{h,f}}."""
    b = lambda x, y: bracket(sig, x, y)
    return b(f, b(g, h)) + b(h, b(f, g)) + b(g, b(h, f))


def contract_sigma_form(sig: PoissonStructure, omega: MixedForm) -> TangentForm:
    """phi^i_k = sum_j sigma^{ij} omega_{j kbar} for a (1,1)-form omega."""
    if omega.n != sig.n:
        raise DimensionError("dimension mismatch")
    comps = {}
    for (I, J), c in omega.components.items():
        if len(I) != 1 or len(J) != 1:
            raise FormError("contract_sigma_form expects a (1,1)-form")
        j, k = I[0], J[0]
        for i in range(1, sig.n + 1):
            s = sig.matrix[i - 1][j - 1]
            if s:
                _add_into(comps, (i, (k,)), c * s)
    return TangentForm(sig.n, 1, comps)


def sigma_of_del(sig: PoissonStructure, beta: MixedForm) -> TangentForm:
    """sigma(del beta) for a (0,1)-form beta: component (i, k) is
    sum_l sigma^{il} d beta_k / dz_l."""
    comps = {}
    for (I, J), c in beta.components.items():
        if I or len(J) != 1:
            raise FormError("sigma_of_del expects a (0,1)-form")
        k = J[0]
        grads = [c.dz(l) for l in range(1, sig.n + 1)]
        for i, v in enumerate(sigma_sharp(sig, grads), start=1):
            if v is not None and v:
                _add_into(comps, (i, (k,)), v)
    return TangentForm(sig.n, 1, comps)


def _one_form_dz_part(a: MixedForm, zero):
    out = [zero] * a.n
    for (I, J), c in a.components.items():
        if len(I) + len(J) != 1:
            raise FormError("sigma_pair expects 1-forms")
        if I:
            out[I[0] - 1] = c
    return out


def sigma_pair(sig: PoissonStructure, a: MixedForm, b: MixedForm):
    """sigma(a, b) = sum sigma^{ij} a_i b_j; dzbar components are annihilated."""
    _check_dim(sig, a, b)
    sample = next(iter(a.components.values()), None) or next(iter(b.components.values()), None)
    if sample is None:
        return Poly.zero(sig.n)
    zero = sample * 0
    av = _one_form_dz_part(a, zero)
    bv = _one_form_dz_part(b, zero)
    acc = zero
    for i in range(sig.n):
        for j in range(sig.n):
            s = sig.matrix[i][j]
            if s and av[i] and bv[j]:
                acc = acc + av[i] * bv[j] * s
    return acc


def modular_vf(sig: PoissonStructure) -> TangentForm:
    if sig.n != 2:
        raise DimensionError("modular vector field is defined here for n = 2 only")
    return modular_vf_of(sig.entry(1, 2))


def modular_vf_of(p) -> TangentForm:
    """dp/dz2 d/dz1 - dp/dz1 d/dz2 for a Poly or TSeries p in dimension 2."""
    if p.n != 2:
        raise DimensionError("modular vector field needs n = 2")
    return TangentForm(2, 0, {(1, ()): p.dz(2), (2, ()): -p.dz(1)})


# -- bivectors over coordinate directions ------------------------------------

def schouten_square(b: CoordBivector) -> dict:
    """[B, B] via the odd-variable calculus: with P = sum_{a<b} B^{ab} th_a th_b,
    [P, P] = 2 sum_a (dP/dth_a)(dP/dx_a).  Returns {(a, b, c): coeff} for
    a < b < c, zero entries dropped."""
    m = 2 * b.n
    dtheta = [dict() for _ in range(m)]
    for (p, q), c in b.components.items():
        _add_into(dtheta[p], q, c)
        _add_into(dtheta[q], p, -c)
    out = {}
    for a in range(m):
        if not dtheta[a]:
            continue
        dx = {}
        for (p, q), c in b.components.items():
            d = c.diff(a)
            if d:
                dx[(p, q)] = d
        for r, u in dtheta[a].items():
            for (p, q), v in dx.items():
                s, key = sort_sign((r, p, q))
                if s:
                    val = u * v * 2
                    _add_into(out, key, val if s == 1 else -val)
    return out


def lie_derivative_bivector(V: CoordVector, B: CoordBivector) -> CoordBivector:
    """(L_V B)^{ab} = V(B^{ab}) - B^{cb} dV^a/dx_c - B^{ac} dV^b/dx_c."""
    m = 2 * B.n
    out = {}
    for (a, b), c in B.components.items():
        v = V.apply(c)
        if v:
            _add_into(out, (a, b), v)
    dV = {a: {c: va.diff(c) for c in range(m)} for a, va in V.components.items()}
    for a in range(m):
        for b in range(a + 1, m):
            acc = None
            for c in range(m):
                if a in dV and dV[a][c]:
                    bcb = _bget(B, c, b)
                    if bcb is not None:
                        t = bcb * dV[a][c]
                        acc = -t if acc is None else acc - t
                if b in dV and dV[b][c]:
                    bac = _bget(B, a, c)
                    if bac is not None:
                        t = bac * dV[b][c]
                        acc = -t if acc is None else acc - t
            if acc is not None:
                _add_into(out, (a, b), acc)
    return CoordBivector(B.n, out)


def _bget(B, a, b):
    if a == b:
        return None
    if a < b:
        return B.components.get((a, b))
    c = B.components.get((b, a))
    return None if c is None else -c


def tangent_to_coord(X: TangentForm) -> CoordVector:
    """A q=0 TangentForm (d/dz components only) as a CoordVector."""
    if X.q != 0:
        raise FormError("need a vector field")
    return CoordVector(X.n, {i - 1: c for (i, _), c in X.components.items()})
