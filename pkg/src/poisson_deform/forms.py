"""
Differential forms on the local model C^n with polynomial (or t-series)
coefficients.

A MixedForm is a sum of c * dz_I ^ dzbar_J with I, J strictly increasing
1-based index tuples, always written with the dz factors first.  The
coefficient ring is either Poly or TSeries; both expose dz/dw/conjugate,
so every operator here works for either.

Bracket convention for tangent-valued (0,q)-forms: for vector fields
X, Y with only d/dz components,

    [X dzbar_J, Y dzbar_K] = [X, Y] dzbar_J ^ dzbar_K

summed over all index tuples, so that for phi = sum_k phi_k dzbar_k the
(j,k) component (j < k) of dbar(phi) + 1/2 [phi, phi] equals the vector
field commutator [d/dzbar_j + phi_j, d/dzbar_k + phi_k].
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .algebra import (AlgebraError, DimensionError, Poly,
                      TSeries, format_poly, format_series)


class FormError(AlgebraError):
    pass


class NotClosedError(FormError):
    """Raised when the homotopy is asked to invert dbar on a form that is
    not dbar-closed; carries the offending residual."""

    def __init__(self, residual):
        super().__init__("input is not dbar-closed; residual has %d components" % len(residual.components))
        self.residual = residual


def sort_sign(idx):
    """Sort an index sequence; return (sign, sorted tuple) or (0, None) on a
    repeated index."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    # insertion sort counting transpositions
    for a in range(1, len(idx)):
        b = a
        while b > 0 and idx[b - 1] > idx[b]:
            idx[b - 1], idx[b] = idx[b], idx[b - 1]
            sign = -sign
            b -= 1
    return sign, tuple(idx)


def _add_into(d, key, c):
    if not c:
        return
    v = d.get(key)
    if v is None:
        d[key] = c
    else:
        v = v + c
        if v:
            d[key] = v
        else:
            del d[key]


class MixedForm:
    """A (possibly inhomogeneous) form sum c * dz_I ^ dzbar_J."""

    __slots__ = ("n", "components")

    def __init__(self, n: int, components: Mapping | None = None):
        self.n = n
        comps = {}
        for (I, J), c in (components or {}).items():
            I, J = tuple(I), tuple(J)
            if not c:
                continue
            if c.n != n:
                raise DimensionError("coefficient dimension mismatch")
            for k in I + J:
                if not 1 <= k <= n:
                    raise DimensionError("form index %d out of range" % k)
            if list(I) != sorted(set(I)) or list(J) != sorted(set(J)):
                raise FormError("indices must be strictly increasing: %r" % ((I, J),))
            comps[(I, J)] = c
        self.components = comps

    @classmethod
    def _raw(cls, n, comps):
        f = object.__new__(cls)
        f.n = n
        f.components = comps
        return f

    @classmethod
    def from_terms(cls, n, terms):
        """Build from (dz_indices, dzbar_indices, coeff) with unordered
        indices, applying the permutation sign."""
        comps = {}
        for I, J, c in terms:
            s1, I2 = sort_sign(I)
            s2, J2 = sort_sign(J)
            if s1 * s2 == 0:
                continue
            _add_into(comps, (I2, J2), c if s1 * s2 == 1 else -c)
        return cls(n, comps)

    @classmethod
    def function(cls, c):
        return cls._raw(c.n, {((), ()): c} if c else {})

    @classmethod
    def dz(cls, n, i, coeff=None):
        return cls._raw(n, {((i,), ()): coeff if coeff is not None else Poly.const(n, 1)})

    @classmethod
    def dzbar(cls, n, i, coeff=None):
        return cls._raw(n, {((), (i,)): coeff if coeff is not None else Poly.const(n, 1)})

    def is_zero(self):
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def bidegrees(self):
        return sorted({(len(I), len(J)) for I, J in self.components})

    @property
    def bidegree(self):
        b = self.bidegrees()
        if len(b) != 1:
            raise FormError("form is not of pure bidegree: %r" % b)
        return b[0]

    def part(self, p, q):
        return MixedForm._raw(self.n, {k: c for k, c in self.components.items()
                                       if len(k[0]) == p and len(k[1]) == q})

    def __getitem__(self, key):
        return self.components.get(key)

    def coeff(self, I, J, zero):
        return self.components.get((tuple(I), tuple(J)), zero)

    def __eq__(self, other):
        if isinstance(other, MixedForm):
            return self.n == other.n and self.components == other.components
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.components.items())))

    def __add__(self, other):
        if not isinstance(other, MixedForm):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError("dimension mismatch")
        out = dict(self.components)
        for k, c in other.components.items():
            _add_into(out, k, c)
        return MixedForm._raw(self.n, out)

    def __neg__(self):
        return MixedForm._raw(self.n, {k: -c for k, c in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        """Multiply by a function (Poly, TSeries or exact scalar)."""
        out = {}
        for k, c in self.components.items():
            v = c * s
            if v:
                out[k] = v
        return MixedForm._raw(self.n, out)

    __rmul__ = __mul__

    def map(self, fn):
        out = {}
        for k, c in self.components.items():
            v = fn(c)
            if v:
                out[k] = v
        return MixedForm._raw(self.n, out)

    def conjugate(self):
        """Complex conjugate: dz_I ^ dzbar_J -> dzbar_I ^ dz_J, reordered."""
        out = {}
        for (I, J), c in self.components.items():
            sign = -1 if (len(I) * len(J)) % 2 else 1
            cc = c.conjugate()
            _add_into(out, (J, I), cc if sign == 1 else -cc)
        return MixedForm._raw(self.n, out)

    def lift(self, order):
        """Promote Poly coefficients to TSeries of the given order."""
        return self.map(lambda c: c if isinstance(c, TSeries) else TSeries.const(c, order))

    def t_coefficient(self, k):
        return self.map(lambda c: c.coeffs[k])

    def __repr__(self):
        return "MixedForm(%s)" % format_form(self)


def format_form(f: MixedForm, upto=None) -> str:
    if not f.components:
        return "0"
    parts = []
    for (I, J), c in sorted(f.components.items()):
        basis = " ^ ".join(["dz%d" % i for i in I] + ["dzbar%d" % j for j in J]) or "1"
        cs = format_series(c, upto) if isinstance(c, TSeries) else format_poly(c)
        parts.append("(%s) %s" % (cs, basis))
    return " + ".join(parts)


def wedge(a: MixedForm, b: MixedForm) -> MixedForm:
    if a.n != b.n:
        raise DimensionError("dimension mismatch")
    out = {}
    for (I1, J1), c1 in a.components.items():
        for (I2, J2), c2 in b.components.items():
            s1, I = sort_sign(I1 + I2)
            if not s1:
                continue
            s2, J = sort_sign(J1 + J2)
            if not s2:
                continue
            sign = s1 * s2 * (-1 if (len(J1) * len(I2)) % 2 else 1)
            c = c1 * c2
            _add_into(out, (I, J), c if sign == 1 else -c)
    return MixedForm._raw(a.n, out)


def del_(f: MixedForm) -> MixedForm:
    """Holomorphic exterior derivative; bidegree (p,q) -> (p+1,q)."""
    out = {}
    for (I, J), c in f.components.items():
        for j in range(1, f.n + 1):
            if j in I:
                continue
            d = c.dz(j)
            if not d:
                continue
            s, I2 = sort_sign((j,) + I)
            _add_into(out, (I2, J), d if s == 1 else -d)
    return MixedForm._raw(f.n, out)


def delbar(f: MixedForm) -> MixedForm:
    """Antiholomorphic exterior derivative; bidegree (p,q) -> (p,q+1)."""
    out = {}
    for (I, J), c in f.components.items():
        base = -1 if len(I) % 2 else 1
        for k in range(1, f.n + 1):
            if k in J:
                continue
            d = c.dw(k)
            if not d:
                continue
            s, J2 = sort_sign((k,) + J)
            _add_into(out, (I, J2), d if s * base == 1 else -d)
    return MixedForm._raw(f.n, out)


def total_d(f: MixedForm) -> MixedForm:
    return del_(f) + delbar(f)


def _homotopy_poly(p: Poly, q: int, slot: int) -> Poly:
    """sum over terms of c/(m+q) * w_slot * monomial, m the w-degree."""
    n = p.n
    out = {}
    for e, c in p.terms.items():
        m = sum(e[n:])
        e2 = list(e)
        e2[n + slot - 1] += 1
        out[tuple(e2)] = c * Fraction(1, m + q)
    return Poly._raw(n, out)


def _homotopy_coeff(c, q, slot):
    if isinstance(c, TSeries):
        return c.map(lambda p: _homotopy_poly(p, q, slot))
    return _homotopy_poly(c, q, slot)


def dolbeault_homotopy(g: MixedForm, check: bool = True) -> MixedForm:
    """Right inverse of dbar on dbar-closed forms with q >= 1.

    Radial (Euler) contraction in the w variables with the z variables as
    parameters: a monomial of w-degree m on a q-index component picks up
    the weight 1/(m+q).
    """
    for I, J in g.components:
        if not J:
            raise FormError("homotopy needs antiholomorphic degree q >= 1")
    if check:
        r = delbar(g)
        if r:
            raise NotClosedError(r)
    out = {}
    for (I, J), c in g.components.items():
        q = len(J)
        base = -1 if len(I) % 2 else 1
        for r, jr in enumerate(J):
            sign = base * (-1 if r % 2 else 1)
            v = _homotopy_coeff(c, q, jr)
            _add_into(out, (I, J[:r] + J[r + 1:]), v if sign == 1 else -v)
    return MixedForm._raw(g.n, out)


# -- tangent-valued forms -----------------------------------------------------

class TangentForm:
    """sum c^i_J d/dz_i (x) dzbar_J over vector index i and increasing J of
    length q."""

    __slots__ = ("n", "q", "components")

    def __init__(self, n: int, q: int, components: Mapping | None = None):
        self.n = n
        self.q = q
        comps = {}
        for (i, J), c in (components or {}).items():
            J = tuple(J)
            if not c:
                continue
            if len(J) != q:
                raise FormError("form degree mismatch in component %r" % ((i, J),))
            if not 1 <= i <= n or any(not 1 <= k <= n for k in J):
                raise DimensionError("index out of range in %r" % ((i, J),))
            if list(J) != sorted(set(J)):
                raise FormError("indices must be strictly increasing: %r" % (J,))
            comps[(i, J)] = c
        self.components = comps

    @classmethod
    def _raw(cls, n, q, comps):
        f = object.__new__(cls)
        f.n, f.q, f.components = n, q, comps
        return f

    @classmethod
    def from_terms(cls, n, q, terms):
        comps = {}
        for i, J, c in terms:
            s, J2 = sort_sign(J)
            if not s:
                continue
            _add_into(comps, (i, J2), c if s == 1 else -c)
        return cls(n, q, comps)

    def is_zero(self):
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        if isinstance(other, TangentForm):
            return (self.n, self.q, self.components) == (other.n, other.q, other.components)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.q, frozenset(self.components.items())))

    def _check(self, other):
        if other.n != self.n or other.q != self.q:
            raise FormError("tangent form shape mismatch")

    def __add__(self, other):
        if not isinstance(other, TangentForm):
            return NotImplemented
        self._check(other)
        out = dict(self.components)
        for k, c in other.components.items():
            _add_into(out, k, c)
        return TangentForm._raw(self.n, self.q, out)

    def __neg__(self):
        return TangentForm._raw(self.n, self.q, {k: -c for k, c in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        out = {}
        for k, c in self.components.items():
            v = c * s
            if v:
                out[k] = v
        return TangentForm._raw(self.n, self.q, out)

    __rmul__ = __mul__

    def map(self, fn):
        out = {}
        for k, c in self.components.items():
            v = fn(c)
            if v:
                out[k] = v
        return TangentForm._raw(self.n, self.q, out)

    def lift(self, order):
        return self.map(lambda c: c if isinstance(c, TSeries) else TSeries.const(c, order))

    def t_coefficient(self, k):
        return self.map(lambda c: c.coeffs[k])

    def vector(self, J):
        """The vector field attached to the form index tuple J, as a dict
        i -> coefficient."""
        J = tuple(J)
        return {i: c for (i, K), c in self.components.items() if K == J}

    def apply(self, f):
        """For q = 0: the derivation sum_i c^i df/dz_i applied to f."""
        if self.q != 0:
            raise FormError("apply needs a vector field (q = 0)")
        acc = None
        for (i, _), c in self.components.items():
            term = c * f.dz(i)
            acc = term if acc is None else acc + term
        if acc is None:
            return f * 0
        return acc

    def __repr__(self):
        return "TangentForm(q=%d, %s)" % (self.q, format_tangent(self))


def format_tangent(f: TangentForm, upto=None) -> str:
    if not f.components:
        return "0"
    parts = []
    for (i, J), c in sorted(f.components.items()):
        basis = "d/dz%d" % i + "".join(" (x) dzbar%d" % j for j in J[:1]) + "".join(" ^ dzbar%d" % j for j in J[1:])
        cs = format_series(c, upto) if isinstance(c, TSeries) else format_poly(c)
        parts.append("(%s) %s" % (cs, basis))
    return " + ".join(parts)


def delbar_tangent(f: TangentForm) -> TangentForm:
    out = {}
    for (i, J), c in f.components.items():
        for k in range(1, f.n + 1):
            if k in J:
                continue
            d = c.dw(k)
            if not d:
                continue
            s, J2 = sort_sign((k,) + J)
            _add_into(out, (i, J2), d if s == 1 else -d)
    return TangentForm._raw(f.n, f.q + 1, out)


def _lie_bracket_z(X: dict, Y: dict):
    """Commutator of two (1,0) vector fields given as i -> coefficient."""
    out = {}
    for l, xl in X.items():
        for i, yi in Y.items():
            d = yi.dz(l)
            if d:
                _add_into(out, i, xl * d)
    for l, yl in Y.items():
        for i, xi in X.items():
            d = xi.dz(l)
            if d:
                _add_into(out, i, -(yl * d))
    return out


def tv_bracket(a: TangentForm, b: TangentForm) -> TangentForm:
    """Bracket of tangent-valued (0,*)-forms: Lie bracket on the vector
    parts, wedge on the form parts."""
    if a.n != b.n:
        raise DimensionError("dimension mismatch")
    _check_orders(a, b)
    groups_a = {}
    for (i, J), c in a.components.items():
        groups_a.setdefault(J, {})[i] = c
    groups_b = {}
    for (i, K), c in b.components.items():
        groups_b.setdefault(K, {})[i] = c
    out = {}
    for J, X in groups_a.items():
        for K, Y in groups_b.items():
            s, L = sort_sign(J + K)
            if not s:
                continue
            for i, c in _lie_bracket_z(X, Y).items():
                _add_into(out, (i, L), c if s == 1 else -c)
    return TangentForm._raw(a.n, a.q + b.q, out)


def _check_orders(a, b):
    orders = set()
    for f in (a, b):
        for c in f.components.values():
            orders.add(c.order if isinstance(c, TSeries) else None)
    if len(orders) > 1:
        raise AlgebraError("truncation order mismatch in bracket: %r" % sorted(orders, key=str))


# -- coordinate vector fields and bivectors over the 2n real directions ------
#
# Direction a in 0..2n-1 is d/dz_{a+1} for a < n and d/dzbar_{a-n+1}
# otherwise, matching the Poly variable slots.

def direction_name(n, a):
    return "d/dz%d" % (a + 1) if a < n else "d/dzbar%d" % (a - n + 1)


class CoordVector:
    """Vector field sum V^a d/dx_a over all 2n coordinate directions."""

    __slots__ = ("n", "components")

    def __init__(self, n, components=None):
        self.n = n
        self.components = {a: c for a, c in (components or {}).items() if c}

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        return isinstance(other, CoordVector) and self.n == other.n and self.components == other.components

    def __add__(self, other):
        out = dict(self.components)
        for a, c in other.components.items():
            _add_into(out, a, c)
        return CoordVector(self.n, out)

    def __neg__(self):
        return CoordVector(self.n, {a: -c for a, c in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, s):
        return CoordVector(self.n, {a: c * s for a, c in self.components.items()})

    __rmul__ = __mul__

    def apply(self, f):
        acc = None
        for a, c in self.components.items():
            d = f.diff(a)
            if d:
                term = c * d
                acc = term if acc is None else acc + term
        return f * 0 if acc is None else acc

    def bracket(self, other: "CoordVector") -> "CoordVector":
        out = {}
        for b, yb in other.components.items():
            v = self.apply(yb)
            if v:
                _add_into(out, b, v)
        for b, xb in self.components.items():
            v = other.apply(xb)
            if v:
                _add_into(out, b, -v)
        return CoordVector(self.n, out)

    def map(self, fn):
        return CoordVector(self.n, {a: fn(c) for a, c in self.components.items()})


class CoordBivector:
    """Antisymmetric B^{ab} over the 2n coordinate directions, stored for
    a < b; B(alpha, beta) = sum_{a,b} B^{ab} alpha_a beta_b."""

    __slots__ = ("n", "components")

    def __init__(self, n, components=None):
        self.n = n
        comps = {}
        for (a, b), c in (components or {}).items():
            if a == b:
                if c:
                    raise FormError("bivector diagonal must vanish")
                continue
            if a > b:
                a, b, c = b, a, -c
            _add_into(comps, (a, b), c)
        self.components = comps

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        return isinstance(other, CoordBivector) and self.n == other.n and self.components == other.components

    def get(self, a, b, zero):
        if a == b:
            return zero
        if a < b:
            return self.components.get((a, b), zero)
        c = self.components.get((b, a))
        return zero if c is None else -c

    def __add__(self, other):
        out = dict(self.components)
        for k, c in other.components.items():
            _add_into(out, k, c)
        return CoordBivector(self.n, out)

    def __neg__(self):
        return CoordBivector(self.n, {k: -c for k, c in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def map(self, fn):
        return CoordBivector(self.n, {k: fn(c) for k, c in self.components.items()})

    def is_zero(self):
        return not self.components

    @classmethod
    def from_vectors(cls, n, pairs):
        """Tensor sum of s * X (x) Y over (s, X, Y) triples; only the a < b
        components are read, so the caller's sum must already be
        antisymmetric (e.g. S_kl X_k (x) X_l over all k, l)."""
        comps = {}
        for s, X, Y in pairs:
            for a, xa in X.components.items():
                for b, yb in Y.components.items():
                    if a < b:
                        _add_into(comps, (a, b), s * xa * yb)
        return cls(n, comps)
