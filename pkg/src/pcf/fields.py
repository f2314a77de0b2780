"""Coefficient fields: the rationals and prime fields.

Elements of ``QQ`` are plain :class:`fractions.Fraction` values.  Elements of
``GF(p)`` are :class:`ModP` values.  Both support ``+ - * /``, equality and
hashing, so polynomial code never needs to know which field it runs over.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterator


class ModP:
    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, ModP):
            if other.p != self.p:
                raise TypeError(f"mixing GF({self.p}) and GF({other.p})")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return ModP(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.v == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        return ModP(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __pow__(self, k: int):
        if k < 0:
            return ModP(pow(self.v, -1, self.p), self.p) ** (-k)
        return ModP(pow(self.v, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"ModP({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class Field:
    """Abstract coefficient field.

    Subclasses provide element construction, a canonical square root and
    text conversion.  ``name`` is the CLI spelling (``q`` or ``fp:<p>``).
    """

    name: str
    characteristic: int

    def __call__(self, x) -> object:
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def sqrt(self, c):
        """Canonical square root of ``c`` or ``None`` if ``c`` is not a square."""
        raise NotImplementedError

    def is_negative(self, c) -> bool:
        return False

    def render(self, c) -> str:
        return str(c)

    def elements(self) -> Iterator:
        raise TypeError(f"{self.name} is infinite")

    @property
    def is_finite(self) -> bool:
        return False

    def __repr__(self):
        return f"<Field {self.name}>"


class RationalField(Field):
    name = "q"
    characteristic = 0

    def __call__(self, x):
        if isinstance(x, ModP):
            raise TypeError("cannot coerce a GF(p) element into QQ")
        return Fraction(x)

    def sqrt(self, c):
        c = Fraction(c)
        if c < 0:
            return None
        n, d = c.numerator, c.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn != n or rd * rd != d:
            return None
        return Fraction(rn, rd)

    def is_negative(self, c) -> bool:
        return c < 0

    def render(self, c) -> str:
        return str(Fraction(c))

    def __reduce__(self):
        return (_qq, ())


class PrimeField(Field):
    characteristic: int

    def __init__(self, p: int):
        if p < 2 or any(p % k == 0 for k in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"{p} is not prime")
        self.characteristic = p
        self.name = f"fp:{p}"

    @property
    def p(self) -> int:
        return self.characteristic

    def __call__(self, x):
        if isinstance(x, ModP):
            if x.p != self.p:
                raise TypeError(f"cannot coerce GF({x.p}) element into GF({self.p})")
            return x
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
            return ModP(x.numerator * pow(x.denominator, -1, self.p), self.p)
        return ModP(int(x), self.p)

    def sqrt(self, c):
        c = self(c)
        for x in range(self.p):
            if (x * x - c.v) % self.p == 0:
                return ModP(x, self.p)
        return None

    def elements(self) -> Iterator[ModP]:
        return (ModP(v, self.p) for v in range(self.p))

    @property
    def is_finite(self) -> bool:
        return True

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def __reduce__(self):
        return (GF, (self.p,))


QQ = RationalField()


def _qq():
    return QQ


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def field_from_name(name: str) -> Field:
    """Parse ``q`` or ``fp:<p>``."""
    name = name.strip().lower()
    if name in ("q", "qq"):
        return QQ
    if name.startswith("fp:"):
        try:
            p = int(name[3:])
        except ValueError:
            raise ValueError(f"bad field spec {name!r}") from None
        return GF(p)
    raise ValueError(f"unknown field {name!r}; expected 'q' or 'fp:<p>'")
