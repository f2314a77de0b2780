"""Elements of the completed Puiseux field at finite precision.

Two representations:

``TruncatedSeries``
    finitely many known terms plus a ``cutoff``: every term with exponent
    strictly greater than the cutoff is listed, nothing is known at or below
    it.  ``cutoff == -inf`` means the value is exact (a finite sum).

``SeriesStream``
    a lazily evaluated, memoized sequence of terms with strictly decreasing
    exponents.  Only an explicit end of the generator means the value is the
    finite sum produced so far.

Exponent divergence to ``-inf`` is not enforced on streams; ``truncate``
takes a pull budget so that streams whose exponents accumulate (used for
type IV constructions) cannot hang a caller.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator

from . import _terms
from .algebra import INF, PuiseuxPoly, RationalPuiseux, reduce_fraction
from .errors import BudgetExhausted, NoSquareRoot, PrecisionExhausted, StreamOrderError
from .fields import Field, ModP, QQ

DEFAULT_PULL_BUDGET = 200_000


def _fmt_cutoff(c) -> str:
    return _terms.format_exponent(Fraction(c))


@dataclass(frozen=True)
class TruncatedSeries:
    field: Field
    terms: tuple
    cutoff: object = -INF

    def __post_init__(self):
        if self.cutoff != -INF:
            object.__setattr__(self, "cutoff", Fraction(self.cutoff))
        if self.terms and self.terms[-1][0] <= self.cutoff:
            object.__setattr__(self, "terms", _terms.keep_above(self.terms, self.cutoff))

    # -- constructors ------------------------------------------------------
    @classmethod
    def exact(cls, field: Field, pairs: Iterable) -> "TruncatedSeries":
        return cls(field, _terms.normalize((e, field(c)) for e, c in pairs), -INF)

    @classmethod
    def from_poly(cls, f: PuiseuxPoly) -> "TruncatedSeries":
        return cls(f.field, f.terms, -INF)

    @classmethod
    def zero(cls, field: Field = QQ, cutoff=-INF) -> "TruncatedSeries":
        return cls(field, (), cutoff)

    # -- inspection --------------------------------------------------------
    @property
    def is_exact(self) -> bool:
        return self.cutoff == -INF

    @property
    def leading_exponent(self):
        """Exponent of the first known term, or ``None`` if nothing is known."""
        return self.terms[0][0] if self.terms else None

    def known_valuation(self):
        """Valuation if it is determined, else ``None``."""
        if self.terms:
            return -self.terms[0][0]
        if self.is_exact:
            return INF
        return None

    def valuation(self):
        v = self.known_valuation()
        if v is None:
            raise PrecisionExhausted(f"valuation of {self} is only known to be >= {-self.cutoff}")
        return v

    def valuation_lower_bound(self):
        v = self.known_valuation()
        return -self.cutoff if v is None else v

    def valuation_at_least(self, r) -> bool:
        """Decide ``nu(self) >= r``; raise when the truncation cannot tell."""
        if self.terms and self.terms[0][0] > -r:
            return False
        if self.cutoff <= -r:
            return True
        raise PrecisionExhausted(f"cannot decide nu >= {r} with cutoff {self.cutoff}")

    def valuation_greater(self, r) -> bool:
        """Decide ``nu(self) > r``."""
        if self.terms and self.terms[0][0] >= -r:
            return False
        if self.cutoff < -r:
            return True
        raise PrecisionExhausted(f"cannot decide nu > {r} with cutoff {self.cutoff}")

    @property
    def ramification(self) -> int:
        return _terms.ramification(self.terms)

    def coefficient(self, e):
        e = Fraction(e)
        if e <= self.cutoff:
            raise PrecisionExhausted(f"coefficient of t^{e} is below the cutoff {self.cutoff}")
        for x, c in self.terms:
            if x == e:
                return c
        return self.field.zero

    def principal_part(self) -> PuiseuxPoly:
        if not self.cutoff < 0:
            raise PrecisionExhausted(
                f"principal part needs every term with exponent >= 0; cutoff is {self.cutoff}"
            )
        return PuiseuxPoly._raw(self.field, tuple((e, c) for e, c in self.terms if e >= 0))

    def truncate(self, cutoff) -> "TruncatedSeries":
        """Forget everything at or below ``cutoff`` (never sharpens)."""
        c = max(self.cutoff, cutoff)
        return TruncatedSeries(self.field, _terms.keep_above(self.terms, c), c)

    def to_rational(self) -> RationalPuiseux:
        if not self.is_exact:
            raise PrecisionExhausted("a truncated series is not an exact element")
        if not self.terms:
            return RationalPuiseux.from_poly(PuiseuxPoly.zero(self.field))
        low = self.terms[-1][0]
        shift = -low if low < 0 else Fraction(0)
        num = PuiseuxPoly._raw(self.field, tuple((e + shift, c) for e, c in self.terms))
        den = PuiseuxPoly.monomial(self.field, shift)
        return reduce_fraction(num, den)

    # -- arithmetic ----------------------------------------------------------
    def _lift(self, other) -> "TruncatedSeries | None":
        if isinstance(other, TruncatedSeries):
            return other
        if isinstance(other, PuiseuxPoly):
            return TruncatedSeries.from_poly(other)
        if isinstance(other, (int, Fraction, ModP)):
            return TruncatedSeries.from_poly(PuiseuxPoly.constant(self.field, other))
        if isinstance(other, RationalPuiseux) and other.is_polynomial():
            return TruncatedSeries.from_poly(other.num)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        c = max(self.cutoff, o.cutoff)
        terms = _terms.add(_terms.keep_above(self.terms, c), _terms.keep_above(o.terms, c))
        return TruncatedSeries(self.field, terms, c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.field, _terms.neg(self.terms), self.cutoff)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def _top(self):
        # largest exponent that may carry a nonzero coefficient
        if self.terms:
            return self.terms[0][0]
        return self.cutoff

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        c = max(self._top() + o.cutoff, o._top() + self.cutoff)
        if c != c:  # nan from inf - inf cannot occur, but stay defensive
            c = -INF
        terms = _terms.mul(self.terms, o.terms, above=None if c == -INF else c)
        return TruncatedSeries(self.field, terms, c)

    __rmul__ = __mul__

    def invert(self, cutoff=None) -> "TruncatedSeries":
        return series_invert(self, cutoff)

    def __str__(self):
        body = _terms.render(self.field, self.terms)
        if self.is_exact:
            return body
        return f"{body} + O({_fmt_cutoff(self.cutoff)})"

    def __repr__(self):
        return f"TruncatedSeries({self})"


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def _long_division(field: Field, num: tuple, den: tuple) -> Iterator[tuple]:
    """Terms of ``num/den`` in decreasing exponent order (possibly infinite)."""
    if not den:
        raise ZeroDivisionError("series division by zero")
    # integer exponents on the common grid (1/N)Z avoid Fraction overhead
    N = 1
    for e, _ in (*num, *den):
        N = math.lcm(N, e.denominator)
    de, dc = den[0]
    de = int(de * N)
    inv = field.one / dc
    rest = [(int(e * N), c) for e, c in den[1:]]
    rem = {int(e * N): c for e, c in num}
    zero = field.zero
    while rem:
        e = max(rem)
        c = rem.pop(e)
        qe, qc = e - de, c * inv
        yield Fraction(qe, N), qc
        for fe, fc in rest:
            k = qe + fe
            v = rem.get(k, zero) - qc * fc
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)


def series_invert(a: TruncatedSeries, cutoff=None) -> TruncatedSeries:
    """``1/a`` with the precision that ``a`` supports.

    If ``a = l + ...`` has leading exponent ``e`` and cutoff ``c``, the result
    is known strictly above ``c - 2e``.  ``cutoff`` may request a coarser
    result; for exact input it is required.
    """
    if not a.terms:
        if a.is_exact:
            raise ZeroDivisionError("inverse of zero")
        raise PrecisionExhausted(f"no known nonzero term in {a}")
    e = a.terms[0][0]
    natural = a.cutoff - 2 * e if not a.is_exact else -INF
    if cutoff is None:
        if natural == -INF:
            if len(a.terms) == 1:
                (e0, c0), = a.terms
                return TruncatedSeries(a.field, ((-e0, a.field.one / c0),), -INF)
            raise ValueError("inverting an exact series needs an explicit cutoff")
        cutoff = natural
    cutoff = max(Fraction(cutoff), natural) if natural != -INF else Fraction(cutoff)
    out = []
    for qe, qc in _long_division(a.field, ((Fraction(0), a.field.one),), a.terms):
        if qe <= cutoff:
            break
        out.append((qe, qc))
    else:
        return TruncatedSeries(a.field, tuple(out), -INF if natural == -INF else cutoff)
    return TruncatedSeries(a.field, tuple(out), cutoff)


class SeriesStream:
    """Memoized lazy term stream.

    ``source`` is a zero-argument callable returning an iterator of
    ``(exponent, coefficient)`` pairs.  The memoized prefix is append-only and
    guarded by a lock, so concurrent readers always observe the same terms.
    """

    def __init__(self, field: Field, source: Callable[[], Iterator], label: str = ""):
        self.field = field
        self.label = label
        self._source = source
        self._it = None
        self._prefix: list = []
        self._ended = False
        self._frontier = INF
        self._pulls = 0
        self._lock = threading.Lock()

    def _pull(self) -> bool:
        # caller holds the lock; zero coefficients only advance the frontier
        if self._ended:
            return False
        if self._it is None:
            self._it = iter(self._source())
        try:
            e, c = next(self._it)
        except StopIteration:
            self._ended = True
            return False
        e = Fraction(e)
        if e >= self._frontier:
            raise StreamOrderError(
                f"stream {self.label or '?'} produced t^{e} after t^{self._frontier}"
            )
        self._frontier = e
        self._pulls += 1
        if c:
            self._prefix.append((e, self.field(c)))
        return True

    def term(self, i: int):
        """The ``i``-th nonzero term, or ``None`` if the stream ends before it."""
        with self._lock:
            while len(self._prefix) <= i:
                if not self._pull():
                    return None
            return self._prefix[i]

    def __iter__(self):
        i = 0
        while True:
            t = self.term(i)
            if t is None:
                return
            yield t
            i += 1

    @property
    def known_terms(self) -> tuple:
        with self._lock:
            return tuple(self._prefix)

    def _above(self, cutoff: Fraction, budget: int) -> TruncatedSeries:
        with self._lock:
            start = self._pulls
            while not self._ended and self._frontier > cutoff:
                if self._pulls - start >= budget:
                    raise BudgetExhausted(
                        f"stream {self.label or '?'} did not pass exponent {cutoff} within {budget} terms"
                    )
                self._pull()
            terms = [t for t in self._prefix if t[0] > cutoff]
            exact = self._ended and len(terms) == len(self._prefix)
        return TruncatedSeries(self.field, tuple(terms), -INF if exact else cutoff)

    def truncate(self, cutoff, budget: int = DEFAULT_PULL_BUDGET) -> TruncatedSeries:
        return truncate(self, cutoff, budget)

    def __str__(self):
        return self.label or "<stream>"

    def __repr__(self):
        return f"SeriesStream({self.label!r})"


def truncate(s, cutoff, budget: int = DEFAULT_PULL_BUDGET) -> TruncatedSeries:
    """All terms of ``s`` with exponent strictly above ``cutoff``.

    The result's cutoff is ``cutoff``, or ``-inf`` when the stream ended first.
    """
    if cutoff == -INF:
        raise ValueError("cannot truncate at -inf")
    cutoff = Fraction(cutoff)
    if not isinstance(s, SeriesStream):
        return to_series(s, cutoff)
    return s._above(cutoff, budget)


def to_series(x, cutoff) -> TruncatedSeries:
    """Any supported value as a ``TruncatedSeries`` known above ``cutoff``.

    Exact finite values stay exact.  A ``TruncatedSeries`` whose own cutoff is
    coarser than requested is returned as is; callers check its cutoff.
    """
    if isinstance(x, TruncatedSeries):
        return x if x.is_exact else x.truncate(cutoff)
    if isinstance(x, PuiseuxPoly):
        return TruncatedSeries.from_poly(x)
    if isinstance(x, RationalPuiseux):
        if x.is_polynomial():
            return TruncatedSeries.from_poly(x.num)
        return truncate(from_rational(x), cutoff)
    if isinstance(x, SeriesStream):
        return truncate(x, cutoff)
    raise TypeError(f"cannot expand {type(x).__name__} as a series")


# -- stream constructors ---------------------------------------------------------

def stream_from_terms(field: Field, terms: Iterable, label: str = "") -> SeriesStream:
    terms = tuple(terms)
    return SeriesStream(field, lambda: iter(terms), label)


def stream_from_series(s: TruncatedSeries, label: str = "") -> SeriesStream:
    if not s.is_exact:
        raise PrecisionExhausted("only exact series become finite streams")
    return stream_from_terms(s.field, s.terms, label or str(s))


def from_rational(x) -> SeriesStream:
    """Descending expansion of an element of k~ by long division."""
    if isinstance(x, PuiseuxPoly):
        return stream_from_terms(x.field, x.terms, str(x))
    if isinstance(x, TruncatedSeries):
        return stream_from_series(x)
    num, den = x.num, x.den
    return SeriesStream(x.field, lambda: _long_division(x.field, num.terms, den.terms), f"rat:{x}")


def as_stream(x) -> SeriesStream:
    if isinstance(x, SeriesStream):
        return x
    return from_rational(x)


def _merge(a: SeriesStream, b: SeriesStream, sign) -> Iterator:
    ia, ib = iter(a), iter(b)
    ta, tb = next(ia, None), next(ib, None)
    while ta is not None or tb is not None:
        if tb is None or (ta is not None and ta[0] > tb[0]):
            yield ta
            ta = next(ia, None)
        elif ta is None or tb[0] > ta[0]:
            yield tb[0], sign * tb[1]
            tb = next(ib, None)
        else:
            # cancellations still advance the exponent frontier
            yield ta[0], ta[1] + sign * tb[1]
            ta, tb = next(ia, None), next(ib, None)


def stream_add(a, b) -> SeriesStream:
    a, b = as_stream(a), as_stream(b)
    return SeriesStream(a.field, lambda: _merge(a, b, 1), f"({a.label}) + ({b.label})")


def stream_sub(a, b) -> SeriesStream:
    a, b = as_stream(a), as_stream(b)
    return SeriesStream(a.field, lambda: _merge(a, b, -1), f"({a.label}) - ({b.label})")


def _sqrt_terms(x: SeriesStream) -> Iterator:
    field = x.field
    if field.characteristic == 2:
        raise NoSquareRoot("square roots need characteristic != 2")
    it = iter(x)
    first = next(it, None)
    if first is None:
        return
    e0, c0 = first
    r0 = field.sqrt(c0)
    if r0 is None:
        raise NoSquareRoot(f"leading coefficient {c0} is not a square in {field.name}")
    s0e = e0 / 2
    yield s0e, r0
    two_r0 = r0 + r0
    S = [(s0e, r0)]
    S2 = {}  # terms of S*S strictly below e0 (e0 cancels by construction)
    pending = next(it, None)
    prev = e0
    while True:
        below = [k for k in S2 if k < prev]
        cand = max(below) if below else None
        if pending is not None and (cand is None or pending[0] >= cand):
            cand = pending[0]
        if cand is None:
            return
        c = -S2.get(cand, field.zero)
        if pending is not None and pending[0] == cand:
            c = c + pending[1]
            pending = next(it, None)
        prev = cand
        if not c:
            continue
        de, dc = cand - s0e, c / two_r0
        yield de, dc
        for se, sc in S:
            k = se + de
            S2[k] = S2.get(k, field.zero) + 2 * sc * dc
        k = 2 * de
        S2[k] = S2.get(k, field.zero) + dc * dc
        S.append((de, dc))


def sqrt_stream(x) -> SeriesStream:
    """Square root with the canonical branch of the leading coefficient.

    For QQ that is the positive root, for GF(p) the least nonnegative one.
    Raises :class:`NoSquareRoot` (lazily for streams, eagerly here when the
    leading term is already available) if no root exists.
    """
    s = as_stream(x)
    lead = s.term(0)
    if lead is not None and s.field.sqrt(lead[1]) is None:
        raise NoSquareRoot(f"leading coefficient {lead[1]} is not a square in {s.field.name}")
    if s.field.characteristic == 2:
        raise NoSquareRoot("square roots need characteristic != 2")
    return SeriesStream(s.field, lambda: _sqrt_terms(s), f"sqrt:{s.label}")


def monomial_stream(field: Field, exponent, coeff=1) -> SeriesStream:
    return stream_from_terms(field, [(Fraction(exponent), field(coeff))], _terms.render(field, ((Fraction(exponent), field(coeff)),)))
