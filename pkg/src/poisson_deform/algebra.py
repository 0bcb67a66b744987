"""
Exact arithmetic: Gaussian rationals, polynomials in z/w variables,
truncated power series in the deformation parameter t, and matrices of
such series.

The antiholomorphic coordinates are independent commuting variables
``w_i`` standing for conj(z_i); complex conjugation is the formal swap
z_i <-> w_i combined with conjugation of coefficients.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence


class AlgebraError(ValueError):
    pass


class DimensionError(AlgebraError):
    pass


class OrderMismatch(AlgebraError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError("exact rational expected, got %r" % (x,))


class GaussianRational:
    """re + im*i with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating point complex is not exact")
        return cls(x)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussianRational.coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            if isinstance(other, (int, Fraction)):
                return GaussianRational(self.re * other, self.im * other)
            return NotImplemented
        if not other.im:
            return GaussianRational(self.re * other.re, self.im * other.re)
        if not self.im:
            return GaussianRational(self.re * other.re, self.re * other.im)
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        if not other:
            raise ZeroDivisionError("division by zero Gaussian rational")
        norm = other.re * other.re + other.im * other.im
        num = self * other.conjugate()
        return GaussianRational(num.re / norm, num.im / norm)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        return "GaussianRational(%s, %s)" % (self.re, self.im)

    def __str__(self):
        return format_coefficient(self)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def format_coefficient(c: GaussianRational) -> str:
    if not c.im:
        return str(c.re)
    if not c.re:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return "%s*i" % c.im
    sign = "+" if c.im > 0 else "-"
    return "(%s%s%s*i)" % (c.re, sign, abs(c.im))


# -- polynomials -------------------------------------------------------------

def _grlex_key(exps):
    return (sum(exps), exps[::-1])


class Poly:
    """Sparse polynomial in z_1..z_n, w_1..w_n with Gaussian rational
    coefficients. Exponent vectors have length 2n, z-part first."""

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[tuple, object] | None = None):
        if n < 1:
            raise DimensionError("dimension must be positive")
        self.n = n
        clean = {}
        if terms:
            for e, c in terms.items():
                c = GaussianRational.coerce(c)
                if c:
                    e = tuple(e)
                    if len(e) != 2 * n:
                        raise DimensionError("exponent %r has wrong length" % (e,))
                    clean[e] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n, terms):
        p = object.__new__(cls)
        p.n = n
        p.terms = terms
        p._hash = None
        return p

    # constructors
    @classmethod
    def zero(cls, n):
        return cls._raw(n, {})

    @classmethod
    def const(cls, n, c):
        c = GaussianRational.coerce(c)
        return cls._raw(n, {(0,) * (2 * n): c} if c else {})

    @classmethod
    def z(cls, n, i):
        _check_index(n, i)
        e = [0] * (2 * n)
        e[i - 1] = 1
        return cls._raw(n, {tuple(e): ONE})

    @classmethod
    def w(cls, n, i):
        _check_index(n, i)
        e = [0] * (2 * n)
        e[n + i - 1] = 1
        return cls._raw(n, {tuple(e): ONE})

    # basic predicates
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_holomorphic(self):
        n = self.n
        return all(not any(e[n:]) for e in self.terms)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * (2 * self.n), ZERO)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.n == other.n and self.terms == other.terms
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == Poly.const(self.n, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    def __len__(self):
        return len(self.terms)

    # arithmetic
    def _lift(self, other):
        if isinstance(other, Poly):
            if other.n != self.n:
                raise DimensionError("dimension mismatch: %d vs %d" % (self.n, other.n))
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return Poly.const(self.n, other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            c = GaussianRational.coerce(other)
            if not c:
                return Poly.zero(self.n)
            return Poly._raw(self.n, {e: v * c for e, v in self.terms.items()})
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if not self.terms or not other.terms:
            return Poly.zero(self.n)
        out: dict = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return Poly._raw(self.n, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise AlgebraError("negative power")
        result = Poly.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c):
        return self * GaussianRational.coerce(c)

    # calculus
    def diff(self, var: int) -> "Poly":
        """Partial derivative along variable slot ``var`` (0-based over the
        2n slots: z_1..z_n then w_1..w_n)."""
        if not 0 <= var < 2 * self.n:
            raise DimensionError("variable slot %d out of range" % var)
        out = {}
        for e, c in self.terms.items():
            k = e[var]
            if k:
                e2 = e[:var] + (k - 1,) + e[var + 1:]
                out[e2] = c * k
        return Poly._raw(self.n, out)

    def dz(self, i: int) -> "Poly":
        _check_index(self.n, i)
        return self.diff(i - 1)

    def dw(self, i: int) -> "Poly":
        _check_index(self.n, i)
        return self.diff(self.n + i - 1)

    def conjugate(self) -> "Poly":
        n = self.n
        return Poly._raw(n, {e[n:] + e[:n]: c.conjugate() for e, c in self.terms.items()})

    def w_euler_split(self) -> Iterator[tuple[int, tuple, GaussianRational]]:
        """Yield (total w-degree, exponents, coefficient) per term."""
        n = self.n
        for e, c in self.terms.items():
            yield sum(e[n:]), e, c

    # division
    def leading(self):
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def divexact(self, other: "Poly") -> "Poly":
        """Exact quotient self / other; raises AlgebraError if other does not
        divide self."""
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        le, lc = other.leading()
        rem = self
        quot = Poly.zero(self.n)
        while rem.terms:
            re_, rc = rem.leading()
            if any(a < b for a, b in zip(re_, le)):
                raise AlgebraError("not divisible")
            qe = tuple(a - b for a, b in zip(re_, le))
            qt = Poly._raw(self.n, {qe: rc / lc})
            quot = quot + qt
            rem = rem - qt * other
        return quot

    def __repr__(self):
        return "Poly(%d, %r)" % (self.n, format_poly(self))

    def __str__(self):
        return format_poly(self)


def _check_index(n, i):
    if not 1 <= i <= n:
        raise DimensionError("index %d out of range 1..%d" % (i, n))


def variable_names(n: int) -> list[str]:
    return ["z%d" % i for i in range(1, n + 1)] + ["w%d" % i for i in range(1, n + 1)]


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    names = variable_names(p.n)
    pieces = []
    for e, c in p.sorted_terms():
        mono = "*".join(
            name if k == 1 else "%s^%d" % (name, k)
            for name, k in zip(names, e) if k
        )
        neg = False
        if not c.im and c.re < 0:
            neg, c = True, -c
        elif not c.re and c.im < 0:
            neg, c = True, -c
        cs = format_coefficient(c)
        if mono:
            body = mono if c == ONE else "%s*%s" % (cs, mono)
        else:
            body = cs
        pieces.append((neg, body))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[zw]\d+)|(?P<i>i)|(?P<op>[-+*^()]))")


class PolySyntaxError(AlgebraError):
    def __init__(self, msg, pos):
        super().__init__("%s at column %d" % (msg, pos + 1))
        self.pos = pos


def _tokenize(text):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError("unexpected character %r" % text[pos], pos)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


def parse_poly(text: str, n: int) -> Poly:
    """Parse the polynomial text grammar, e.g. ``"3/2*z1^3 - i*z2*w1"``."""
    toks = _tokenize(text)
    k = 0

    def peek():
        return toks[k]

    def take():
        nonlocal k
        t = toks[k]
        k += 1
        return t

    def parse_paren_coefficient():
        # '(' rational ('+'|'-') rational '*i' ')' ; lenient on the shape
        inner = parse_sum(closing=True)
        kind, val, pos = take()
        if val != ")":
            raise PolySyntaxError("expected ')'", pos)
        return inner

    def parse_factor():
        kind, val, pos = take()
        if kind == "num":
            try:
                f = Poly.const(n, Fraction(val))
            except ZeroDivisionError:
                raise PolySyntaxError("zero denominator", pos)
        elif kind == "i":
            f = Poly.const(n, I)
        elif kind == "var":
            idx = int(val[1:])
            if not 1 <= idx <= n:
                raise PolySyntaxError("variable %s out of range for n=%d" % (val, n), pos)
            f = Poly.z(n, idx) if val[0] == "z" else Poly.w(n, idx)
        elif val == "(":
            f = parse_paren_coefficient()
        else:
            raise PolySyntaxError("unexpected %r" % (val,), pos)
        if peek()[1] == "^":
            take()
            kind, val, pos = take()
            if kind != "num" or "/" in val:
                raise PolySyntaxError("exponent must be a nonnegative integer", pos)
            f = f ** int(val)
        return f

    def parse_term():
        f = parse_factor()
        while peek()[1] == "*":
            take()
            f = f * parse_factor()
        return f

    def parse_sum(closing=False):
        total = Poly.zero(n)
        sign = 1
        kind, val, pos = peek()
        if val in "+-" and kind == "op":
            take()
            sign = -1 if val == "-" else 1
        total = total + parse_term() * sign
        while True:
            kind, val, pos = peek()
            if kind == "op" and val in ("+", "-"):
                take()
                t = parse_term()
                total = total + t if val == "+" else total - t
            elif kind == "end" or (closing and val == ")"):
                return total
            else:
                raise PolySyntaxError("unexpected %r" % (val,), pos)

    if toks[0][0] == "end":
        raise PolySyntaxError("empty polynomial", 0)
    result = parse_sum()
    if peek()[0] != "end":
        raise PolySyntaxError("trailing input", peek()[2])
    return result


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if a.n != b.n:
        raise DimensionError("dimension mismatch: %d vs %d" % (a.n, b.n))
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError("unknown op %r" % op)


def differentiate(p: Poly, var: str) -> Poly:
    """``var`` is a name like 'z2' or 'w1'."""
    m = re.fullmatch(r"([zw])(\d+)", var)
    if not m:
        raise DimensionError("bad variable %r" % var)
    i = int(m.group(2))
    return p.dz(i) if m.group(1) == "z" else p.dw(i)


def conjugate(p: Poly) -> Poly:
    return p.conjugate()


# -- truncated power series in t ---------------------------------------------

class TSeries:
    """sum_k coeffs[k] t^k, truncated above t^order."""

    __slots__ = ("n", "order", "coeffs")

    def __init__(self, n: int, order: int, coeffs: Iterable[Poly] = ()):
        if order < 0:
            raise AlgebraError("order must be nonnegative")
        cs = list(coeffs)
        if len(cs) > order + 1:
            raise OrderMismatch("%d coefficients exceed order %d" % (len(cs), order))
        for c in cs:
            if c.n != n:
                raise DimensionError("coefficient dimension mismatch")
        cs.extend(Poly.zero(n) for _ in range(order + 1 - len(cs)))
        self.n = n
        self.order = order
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, n, order):
        return cls(n, order)

    @classmethod
    def const(cls, p: Poly, order: int):
        return cls(p.n, order, [p])

    @classmethod
    def one(cls, n, order):
        return cls(n, order, [Poly.const(n, 1)])

    @classmethod
    def t_power(cls, n, order, k, coeff: Poly | None = None):
        coeff = Poly.const(n, 1) if coeff is None else coeff
        cs = [Poly.zero(n)] * (order + 1)
        if k <= order:
            cs[k] = coeff
        return cls(n, order, cs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def first_nonzero_order(self):
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def __eq__(self, other):
        if isinstance(other, TSeries):
            return self.n == other.n and self.order == other.order and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.order, self.coeffs))

    def _check(self, other):
        if other.n != self.n:
            raise DimensionError("dimension mismatch")
        if other.order != self.order:
            raise OrderMismatch("truncation order mismatch: %d vs %d" % (self.order, other.order))

    def _coerce(self, other):
        if isinstance(other, TSeries):
            self._check(other)
            return other
        if isinstance(other, Poly):
            if other.n != self.n:
                raise DimensionError("dimension mismatch")
            return TSeries(self.n, self.order, [other])
        if isinstance(other, (int, Fraction, GaussianRational)):
            return TSeries(self.n, self.order, [Poly.const(self.n, other)])
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return TSeries(self.n, self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return TSeries(self.n, self.order, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return TSeries(self.n, self.order, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, Poly)):
            return TSeries(self.n, self.order, [a * other for a in self.coeffs])
        if not isinstance(other, TSeries):
            return NotImplemented
        self._check(other)
        N = self.order
        out = [Poly.zero(self.n) for _ in range(N + 1)]
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j in range(N + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return TSeries(self.n, N, out)

    __rmul__ = __mul__

    def map(self, fn) -> "TSeries":
        return TSeries(self.n, self.order, [fn(c) for c in self.coeffs])

    def dz(self, i):
        return self.map(lambda c: c.dz(i))

    def dw(self, i):
        return self.map(lambda c: c.dw(i))

    def diff(self, var):
        return self.map(lambda c: c.diff(var))

    def conjugate(self):
        return self.map(Poly.conjugate)

    def t_derivative(self) -> "TSeries":
        """d/dt, kept at the same truncation order; the top coefficient
        becomes unknown and is set to zero."""
        cs = [self.coeffs[k] * k for k in range(1, self.order + 1)]
        return TSeries(self.n, self.order, cs)

    def truncate(self, order: int) -> "TSeries":
        if order > self.order:
            raise OrderMismatch("cannot raise truncation order %d to %d" % (self.order, order))
        return TSeries(self.n, order, self.coeffs[: order + 1])

    def rescale_t(self, s) -> "TSeries":
        """f(t) -> f(s t) for an exact scalar s."""
        s = GaussianRational.coerce(s)
        out, f = [], ONE
        for c in self.coeffs:
            out.append(c * f)
            f = f * s
        return TSeries(self.n, self.order, out)

    def __repr__(self):
        return "TSeries(order=%d, %s)" % (self.order, format_series(self))


def format_series(s: TSeries, upto: int | None = None) -> str:
    parts = []
    top = s.order if upto is None else min(upto, s.order)
    for k in range(top + 1):
        c = s.coeffs[k]
        if c:
            parts.append("t^%d*(%s)" % (k, format_poly(c)))
    return " + ".join(parts) if parts else "0"


def series_invert(s: TSeries) -> TSeries:
    """Inverse of a series whose t^0 coefficient is the constant 1."""
    if s.coeffs[0] != Poly.const(s.n, 1):
        raise AlgebraError("series is not a unit: t^0 coefficient is %s" % format_poly(s.coeffs[0]))
    N = s.order
    inv = [Poly.const(s.n, 1)]
    for k in range(1, N + 1):
        acc = Poly.zero(s.n)
        for j in range(1, k + 1):
            if s.coeffs[j]:
                acc = acc + s.coeffs[j] * inv[k - j]
        inv.append(-acc)
    return TSeries(s.n, N, inv)


# -- matrices of series ------------------------------------------------------

class SeriesMatrix:
    """Square matrix with TSeries entries (row-major, 0-based)."""

    __slots__ = ("size", "rows")

    def __init__(self, rows: Sequence[Sequence[TSeries]]):
        rows = [tuple(r) for r in rows]
        m = len(rows)
        if any(len(r) != m for r in rows):
            raise DimensionError("matrix must be square")
        if m:
            n, N = rows[0][0].n, rows[0][0].order
            for r in rows:
                for e in r:
                    if e.n != n:
                        raise DimensionError("entry dimension mismatch")
                    if e.order != N:
                        raise OrderMismatch("entry truncation order mismatch")
        self.size = m
        self.rows = tuple(rows)

    @property
    def n(self):
        return self.rows[0][0].n

    @property
    def order(self):
        return self.rows[0][0].order

    @classmethod
    def identity(cls, size, n, order):
        return cls([[TSeries.one(n, order) if i == j else TSeries.zero(n, order)
                     for j in range(size)] for i in range(size)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, SeriesMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __add__(self, other):
        return SeriesMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return SeriesMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self):
        return SeriesMatrix([[-a for a in r] for r in self.rows])

    def __mul__(self, other):
        if not isinstance(other, SeriesMatrix):
            return SeriesMatrix([[a * other for a in r] for r in self.rows])
        if other.size != self.size:
            raise DimensionError("matrix size mismatch")
        m = self.size
        n, N = self.n, self.order
        out = []
        for i in range(m):
            row = []
            for j in range(m):
                acc = TSeries.zero(n, N)
                for k in range(m):
                    a, b = self.rows[i][k], other.rows[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return SeriesMatrix(out)

    def transpose(self):
        return SeriesMatrix([list(col) for col in zip(*self.rows)])

    def map(self, fn):
        return SeriesMatrix([[fn(a) for a in r] for r in self.rows])

    def conjugate(self):
        return self.map(TSeries.conjugate)

    def coefficient(self, k):
        """The t^k coefficient as a list of lists of Poly."""
        return [[a.coeffs[k] for a in r] for r in self.rows]

    def is_identity(self):
        return self == SeriesMatrix.identity(self.size, self.n, self.order)

    def __repr__(self):
        return "SeriesMatrix(%r)" % (self.rows,)


def matrix_series_invert(M: SeriesMatrix) -> SeriesMatrix:
    """Inverse of I + E with E = O(t): the Neumann sum of (-E)^k, k <= order."""
    n, N, m = M.n, M.order, M.size
    one = Poly.const(n, 1)
    for i in range(m):
        for j in range(m):
            want = one if i == j else Poly.zero(n)
            if M.rows[i][j].coeffs[0] != want:
                raise AlgebraError("t^0 part of matrix is not the identity")
    ident = SeriesMatrix.identity(m, n, N)
    negE = ident - M
    result = ident
    power = ident
    for _ in range(N):
        power = power * negE
        result = result + power
    return result
