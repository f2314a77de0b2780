"""Puiseux polynomials and comaximal fractions of them.

``PuiseuxPoly`` is an element of the ring of Puiseux polynomials: a finite sum
``c_i * t**r_i`` with rational ``r_i >= 0``.  ``RationalPuiseux`` is a fraction
``num/den`` of two such polynomials, kept comaximal with a monic denominator.

The valuation is normalized so that ``valuation(t) == -1``; ``degree`` is its
negative.  The zero element has valuation ``+inf`` and degree ``-inf``
(``math.inf``), which compare correctly against :class:`Fraction`.

Greatest common divisors are never computed inside the (non-Noetherian)
ring of Puiseux polynomials directly.  Both operands are rewritten as ordinary
polynomials in ``u = t**(1/n)`` where ``n`` is the common ramification index,
and Euclid runs there.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from . import _terms
from .fields import Field, ModP, QQ

INF = math.inf


def _field_of(x) -> Field | None:
    return getattr(x, "field", None)


class PuiseuxPoly:
    """A Puiseux polynomial over ``field``.

    >>> t = PuiseuxPoly.gen()
    >>> str(t**2 + PuiseuxPoly.monomial(QQ, Fraction(1, 2), 2) - 5)
    't^(2) + 2*t^(1/2) - 5'
    """

    __slots__ = ("field", "terms")

    def __init__(self, field: Field = QQ, terms=()):
        terms = _terms.normalize((e, field(c)) for e, c in terms)
        if terms and terms[-1][0] < 0:
            raise ValueError(f"negative exponent {terms[-1][0]} in a Puiseux polynomial")
        self.field = field
        self.terms = terms

    @classmethod
    def _raw(cls, field: Field, terms) -> "PuiseuxPoly":
        obj = object.__new__(cls)
        obj.field = field
        obj.terms = terms
        return obj

    @classmethod
    def monomial(cls, field: Field, exponent, coeff=1) -> "PuiseuxPoly":
        return cls(field, [(Fraction(exponent), coeff)])

    @classmethod
    def constant(cls, field: Field, c) -> "PuiseuxPoly":
        return cls(field, [(Fraction(0), c)])

    @classmethod
    def gen(cls, field: Field = QQ) -> "PuiseuxPoly":
        return cls.monomial(field, 1)

    @classmethod
    def zero(cls, field: Field = QQ) -> "PuiseuxPoly":
        return cls._raw(field, ())

    # -- structure -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def degree(self):
        return self.terms[0][0] if self.terms else -INF

    @property
    def valuation(self):
        return -self.terms[0][0] if self.terms else INF

    @property
    def leading_coefficient(self):
        return self.terms[0][1] if self.terms else self.field.zero

    @property
    def ramification(self) -> int:
        return _terms.ramification(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    def coefficient(self, e) -> object:
        e = Fraction(e)
        for x, c in self.terms:
            if x == e:
                return c
        return self.field.zero

    def monic(self) -> "PuiseuxPoly":
        if not self.terms:
            return self
        return self * (self.field.one / self.leading_coefficient)

    # -- arithmetic --------------------------------------------------------
    def _lift(self, other) -> "PuiseuxPoly | None":
        if isinstance(other, PuiseuxPoly):
            if other.field != self.field:
                raise TypeError(f"field mismatch: {self.field.name} vs {other.field.name}")
            return other
        if isinstance(other, (int, Fraction, ModP)):
            return PuiseuxPoly.constant(self.field, other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return PuiseuxPoly._raw(self.field, _terms.add(self.terms, o.terms))

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxPoly._raw(self.field, _terms.neg(self.terms))

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return PuiseuxPoly._raw(self.field, _terms.add(self.terms, _terms.neg(o.terms)))

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return PuiseuxPoly._raw(self.field, _terms.mul(self.terms, o.terms))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = PuiseuxPoly.constant(self.field, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        o = self._lift(other)
        if o is not None:
            return reduce_fraction(self, o)
        if isinstance(other, RationalPuiseux):
            return RationalPuiseux.from_poly(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return reduce_fraction(o, self)

    def __eq__(self, other):
        if isinstance(other, PuiseuxPoly):
            return self.field == other.field and self.terms == other.terms
        if isinstance(other, RationalPuiseux):
            return other == self
        if isinstance(other, (int, Fraction, ModP)):
            return self.terms == PuiseuxPoly.constant(self.field, other).terms
        return NotImplemented

    def __hash__(self):
        return hash(("PuiseuxPoly", self.terms))

    def __str__(self):
        return _terms.render(self.field, self.terms)

    def __repr__(self):
        return f"PuiseuxPoly({self})"


class RationalPuiseux:
    """A comaximal fraction ``num/den`` with ``den`` monic.

    Construct through :func:`reduce_fraction` (or the ``/`` operator on
    polynomials); the constructor itself normalizes.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: PuiseuxPoly, den: PuiseuxPoly | None = None):
        if den is None:
            den = PuiseuxPoly.constant(num.field, 1)
        r = reduce_fraction(num, den)
        self.num = r.num
        self.den = r.den

    @classmethod
    def _raw(cls, num: PuiseuxPoly, den: PuiseuxPoly) -> "RationalPuiseux":
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def from_poly(cls, f: PuiseuxPoly) -> "RationalPuiseux":
        return cls._raw(f, PuiseuxPoly.constant(f.field, 1))

    @property
    def field(self) -> Field:
        return self.num.field

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_poly(self) -> PuiseuxPoly:
        if not self.is_polynomial():
            raise ValueError(f"{self} is not a Puiseux polynomial")
        return self.num

    @property
    def valuation(self):
        if self.num.is_zero():
            return INF
        return self.num.valuation - self.den.valuation

    @property
    def degree(self):
        return -self.valuation

    @property
    def ramification(self) -> int:
        return math.lcm(self.num.ramification, self.den.ramification)

    def _lift(self, other) -> "RationalPuiseux | None":
        if isinstance(other, RationalPuiseux):
            return other
        if isinstance(other, PuiseuxPoly):
            return RationalPuiseux.from_poly(other)
        if isinstance(other, (int, Fraction, ModP)):
            return RationalPuiseux.from_poly(PuiseuxPoly.constant(self.field, other))
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return reduce_fraction(self.num + o.num, self.den)
        return reduce_fraction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalPuiseux._raw(-self.num, self.den)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return reduce_fraction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def invert(self) -> "RationalPuiseux":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return reduce_fraction(self.den, self.num)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.invert()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.invert()

    def __eq__(self, other):
        o = self._lift(other) if not isinstance(other, RationalPuiseux) else other
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self.den.is_constant():
            return hash(self.num)
        return hash(("RationalPuiseux", self.num.terms, self.den.terms))

    def __str__(self):
        if self.is_polynomial():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalPuiseux({self})"


# -- dense univariate polynomials in u = t^(1/n) -----------------------------
# coefficient lists, lowest degree first, no trailing zeros

def to_dense(f: PuiseuxPoly, n: int) -> list:
    if not f.terms:
        return []
    top = f.terms[0][0] * n
    if top.denominator != 1:
        raise ValueError(f"{f} does not live in A_{n}")
    out = [f.field.zero] * (int(top) + 1)
    for e, c in f.terms:
        k = e * n
        if k.denominator != 1:
            raise ValueError(f"{f} does not live in A_{n}")
        out[int(k)] = c
    return out


def from_dense(field: Field, coeffs: Sequence, n: int) -> PuiseuxPoly:
    terms = tuple((Fraction(k, n), c) for k, c in reversed(list(enumerate(coeffs))) if c)
    return PuiseuxPoly._raw(field, terms)


def _trim(a: list) -> list:
    while a and not a[-1]:
        a.pop()
    return a


def dense_divmod(a: list, b: list) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    if len(a) < len(b):
        return [], _trim(a)
    inv = 1 / b[-1] if not isinstance(b[-1], ModP) else b[-1] ** -1
    db = len(b) - 1
    q = [b[-1] * 0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if not c:
            continue
        c = c * inv
        q[k - db] = c
        for j in range(db + 1):
            if b[j]:
                a[k - db + j] = a[k - db + j] - c * b[j]
    return _trim(q), _trim(a[:db])


def _primitive(a: list) -> list:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    if a[-1] < 0:
        g = -g
    return [c // g for c in a]


def _int_gcd(a: list, b: list) -> list:
    """Primitive pseudo-remainder sequence over Z; the gcd up to a unit."""
    while b:
        lc, db = b[-1], len(b) - 1
        r = list(a)
        while len(r) > db:
            c, k = r[-1], len(r) - 1 - db
            r = [x * lc for x in r]
            for j, y in enumerate(b):
                r[k + j] -= c * y
            _trim(r)
        a, b = b, (_primitive(r) if r else r)
    return _primitive(a)


def dense_gcd(a: list, b: list) -> list:
    a, b = _trim(list(a)), _trim(list(b))
    if a and b and all(type(c) is Fraction for c in (*a, *b)):
        # rational coefficients: clear denominators and stay in Z
        def ints(p):
            m = math.lcm(*(c.denominator for c in p))
            return [int(c * m) for c in p]
        g = _int_gcd(ints(a), ints(b))
        return [Fraction(c, g[-1]) for c in g]
    while b:
        _, r = dense_divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lead = a[-1]
    return [c / lead for c in a]


def _common_n(*fs: PuiseuxPoly) -> int:
    n = 1
    for f in fs:
        n = math.lcm(n, f.ramification)
    return n


def reduce_fraction(p: PuiseuxPoly, q: PuiseuxPoly) -> RationalPuiseux:
    """Comaximal, denominator-monic representative of ``p/q``.

    >>> t = PuiseuxPoly.gen()
    >>> str(reduce_fraction(t - 1, PuiseuxPoly.monomial(QQ, Fraction(1, 2)) - 1))
    't^(1/2) + 1'
    """
    if q.is_zero():
        raise ZeroDivisionError("fraction with zero denominator")
    field = q.field
    if p.is_zero():
        return RationalPuiseux._raw(p, PuiseuxPoly.constant(field, 1))
    if q.is_constant():
        c = q.leading_coefficient
        return RationalPuiseux._raw(p * (field.one / c), PuiseuxPoly.constant(field, 1))
    if len(q.terms) == 1:
        # monomial denominator: the gcd is a power of t, no Euclid needed
        (e, c), = q.terms
        m = min(e, p.terms[-1][0])
        inv = field.one / c
        num = PuiseuxPoly._raw(field, tuple((pe - m, pc * inv) for pe, pc in p.terms))
        return RationalPuiseux._raw(num, PuiseuxPoly.monomial(field, e - m))
    n = _common_n(p, q)
    dp, dq = to_dense(p, n), to_dense(q, n)
    g = dense_gcd(dp, dq)
    if len(g) > 1:
        dp, _ = dense_divmod(dp, g)
        dq, _ = dense_divmod(dq, g)
    lead = dq[-1]
    dp = [c / lead for c in dp]
    dq = [c / lead for c in dq]
    return RationalPuiseux._raw(from_dense(field, dp, n), from_dense(field, dq, n))


def poly_divmod(p: PuiseuxPoly, q: PuiseuxPoly) -> tuple[PuiseuxPoly, PuiseuxPoly]:
    """Division with remainder after substituting ``u = t^(1/n)``."""
    n = _common_n(p, q)
    quo, rem = dense_divmod(to_dense(p, n), to_dense(q, n))
    return from_dense(p.field, quo, n), from_dense(p.field, rem, n)


def poly_gcd(p: PuiseuxPoly, q: PuiseuxPoly) -> PuiseuxPoly:
    n = _common_n(p, q)
    return from_dense(p.field, dense_gcd(to_dense(p, n), to_dense(q, n)), n)


def is_comaximal(p: PuiseuxPoly, q: PuiseuxPoly) -> bool:
    g = poly_gcd(p, q)
    return g.is_constant() and not g.is_zero()


def valuation(x):
    """``nu(x)`` with ``nu(t) = -1``; ``+inf`` for zero."""
    if isinstance(x, (PuiseuxPoly, RationalPuiseux)):
        return x.valuation
    if hasattr(x, "valuation"):
        v = x.valuation
        return v() if callable(v) else v
    raise TypeError(f"no valuation for {type(x).__name__}")


def degree(x):
    return -valuation(x)


def principal_part(z) -> PuiseuxPoly:
    """The unique Puiseux polynomial ``f`` with ``nu(z - f) > 0``.

    Truncated series delegate to their own method, which refuses to answer
    when the terms with nonnegative exponent are not all known.
    """
    if isinstance(z, PuiseuxPoly):
        return z
    if isinstance(z, RationalPuiseux):
        if z.is_polynomial():
            return z.num
        quo, _ = poly_divmod(z.num, z.den)
        return quo
    if hasattr(z, "principal_part"):
        return z.principal_part()
    raise TypeError(f"no principal part for {type(z).__name__}")


def coerce_rational(x, field: Field | None = None) -> RationalPuiseux:
    if isinstance(x, RationalPuiseux):
        return x
    if isinstance(x, PuiseuxPoly):
        return RationalPuiseux.from_poly(x)
    if isinstance(x, (int, Fraction, ModP)):
        return RationalPuiseux.from_poly(PuiseuxPoly.constant(field or QQ, x))
    if hasattr(x, "to_rational"):
        return x.to_rational()
    raise TypeError(f"cannot read {type(x).__name__} as an element of k~")
