"""Continued fractions ``[f0; f1, f2, ...]`` with Puiseux polynomial partials.

Expansion repeatedly splits off the principal part:  ``f_n`` is the part of
``z_n`` with nonnegative exponents and ``z_{n+1} = 1/(z_n - f_n)``.  Every
partial after the first has positive degree.

Approximants use the usual three-term recursion

    p_k = f_k p_{k-1} + p_{k-2},   q_k = f_k q_{k-1} + q_{k-2}

seeded with ``p_{-1} = 1, q_{-1} = 0, p_{-2} = 0, q_{-2} = 1``.  The pairs are
kept unnormalized so that ``p_k q_{k-1} - p_{k-1} q_k = (-1)**(k-1)`` holds
literally; :attr:`ApproximantPair.value` gives the reduced fraction.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .algebra import (
    INF,
    PuiseuxPoly,
    RationalPuiseux,
    coerce_rational,
    from_dense,
    dense_divmod,
    to_dense,
    reduce_fraction,
)
from .errors import (
    BadCertificate,
    BudgetExhausted,
    InvalidElement,
    PrecisionExhausted,
    IdentityCheckFailed,
)
from .fields import Field
from .series import (
    SeriesStream,
    TruncatedSeries,
    _long_division,
    as_stream,
    stream_sub,
    truncate,
)

ENDED = "ended"
BUDGET = "budget-exhausted"
PRECISION = "precision-exhausted"
RUNNING = "running"


@dataclass(frozen=True)
class CFExpression:
    """A finite expression, or a finite prefix of an infinite one.

    ``finite`` says whether the expression is complete; ``status`` records why
    an expansion stopped (``ended`` for complete expressions).
    """

    f0: PuiseuxPoly
    partials: tuple = ()
    finite: bool = True
    status: str = ENDED

    def __post_init__(self):
        object.__setattr__(self, "partials", tuple(self.partials))
        for i, f in enumerate(self.partials, 1):
            if not f.degree > 0:
                raise InvalidElement(f"partial f{i} = {f} must have positive degree")

    @property
    def field(self) -> Field:
        return self.f0.field

    @property
    def length(self) -> int:
        """Index of the last available partial."""
        return len(self.partials)

    def __len__(self):
        return len(self.partials) + 1

    def __getitem__(self, i: int) -> PuiseuxPoly:
        return self.f0 if i == 0 else self.partials[i - 1]

    @property
    def degrees(self) -> tuple:
        return tuple(f.degree for f in self.partials)

    def prefix(self, n: int) -> "CFExpression":
        """The finite expression ``[f0; f1, ..., fn]``."""
        if n > len(self.partials):
            raise IndexError(f"only {len(self.partials)} partials available")
        return CFExpression(self.f0, self.partials[:n], True, ENDED)

    def starts_with(self, other: "CFExpression") -> bool:
        if other.f0 != self.f0 or len(other.partials) > len(self.partials):
            return False
        return self.partials[: len(other.partials)] == other.partials

    def __str__(self):
        if not self.partials:
            return f"[{self.f0}]"
        return f"[{self.f0}; {', '.join(str(f) for f in self.partials)}]"

    def render(self) -> str:
        """Text form with a status tag; unfinished prefixes end in ``, ...``."""
        if self.finite:
            return f"{self} ({self.status})"
        body = str(self)[:-1]
        sep = ", " if self.partials else "; "
        return f"{body}{sep}...] ({self.status})"

    def to_json(self) -> dict:
        return {
            "f0": str(self.f0),
            "partials": [str(f) for f in self.partials],
            "finite": self.finite,
            "status": self.status,
        }


class LazyCF:
    """An expression whose partials come from a (possibly infinite) generator.

    Partials are memoized in an append-only list under a lock.
    """

    def __init__(self, f0: PuiseuxPoly, source: Callable[[], Iterator], label: str = ""):
        self.f0 = f0
        self.label = label
        self._source = source
        self._it = None
        self._partials: list = []
        self._ended = False
        self._lock = threading.Lock()

    @property
    def field(self) -> Field:
        return self.f0.field

    def partial(self, i: int):
        """``f_i`` for ``i >= 1``, or ``None`` when the expression is shorter."""
        with self._lock:
            while len(self._partials) < i and not self._ended:
                if self._it is None:
                    self._it = iter(self._source())
                try:
                    f = next(self._it)
                except StopIteration:
                    self._ended = True
                    break
                if not f.degree > 0:
                    raise InvalidElement(f"partial f{len(self._partials) + 1} = {f} must have positive degree")
                self._partials.append(f)
            return self._partials[i - 1] if i <= len(self._partials) else None

    def prefix(self, n: int) -> CFExpression:
        """First ``n`` partials; complete (``ended``) if the expression is shorter."""
        parts = []
        for i in range(1, n + 1):
            f = self.partial(i)
            if f is None:
                return CFExpression(self.f0, parts, True, ENDED)
            parts.append(f)
        if self.partial(n + 1) is None:
            return CFExpression(self.f0, parts, True, ENDED)
        return CFExpression(self.f0, parts, False, BUDGET)

    def __str__(self):
        return self.label or "<cf>"


def periodic_cf(f0: PuiseuxPoly, pre: Sequence[PuiseuxPoly], period: Sequence[PuiseuxPoly]) -> LazyCF:
    """``[f0; pre..., (period...)]`` with the parenthesized block repeating."""
    pre, period = tuple(pre), tuple(period)

    def gen():
        yield from pre
        if not period:
            return
        while True:
            yield from period

    body = ", ".join([str(f) for f in pre] + ([f"({', '.join(str(f) for f in period)})"] if period else []))
    label = f"[{f0}; {body}]" if body else f"[{f0}]"
    return LazyCF(f0, gen, label)


def as_lazy(cf) -> LazyCF:
    if isinstance(cf, LazyCF):
        return cf
    parts = cf.partials
    return LazyCF(cf.f0, lambda: iter(parts), str(cf))


# -- expansion ---------------------------------------------------------------------

def expand_exact(z) -> CFExpression:
    """Complete expansion of an element of k~ (always terminates).

    >>> t = PuiseuxPoly.gen()
    >>> str(expand_exact((t * t + 1) / t))
    '[t; t]'
    """
    z = coerce_rational(z)
    field = z.field
    n = z.ramification
    a, b = to_dense(z.num, n), to_dense(z.den, n)
    quo, rem = dense_divmod(a, b)
    f0 = from_dense(field, quo, n)
    parts = []
    a, b = b, rem
    while b:
        quo, rem = dense_divmod(a, b)
        parts.append(from_dense(field, quo, n))
        a, b = b, rem
    return CFExpression(f0, parts, True, ENDED)


@dataclass(frozen=True)
class Expansion:
    """Result of expanding a finite-precision element.

    ``zs[i]`` is the truncation of ``z_i`` the algorithm worked with.
    """

    cf: CFExpression
    zs: tuple = ()

    @property
    def status(self) -> str:
        return self.cf.status

    def __iter__(self):
        yield self.cf
        yield self.cf.status


def _clip(cf: CFExpression, max_terms: int) -> CFExpression:
    if len(cf.partials) <= max_terms:
        return cf
    return CFExpression(cf.f0, cf.partials[:max_terms], False, BUDGET)


def expand_stream(z, max_terms: int, cutoff=Fraction(-50)) -> Expansion:
    """Expand ``z`` from its truncation at ``cutoff``.

    Produces at most ``max_terms`` partials after ``f0``.  Every returned
    partial is certified by the available precision.  When the truncation
    turns out to be exact (the stream ended) the exact algorithm is used.
    """
    if max_terms < 0:
        raise ValueError("max_terms must be >= 0")
    if isinstance(z, (PuiseuxPoly, RationalPuiseux)):
        cf = expand_exact(z)
        return Expansion(_clip(cf, max_terms))
    x = truncate(z, cutoff) if isinstance(z, SeriesStream) else z
    if x.is_exact:
        return Expansion(_clip(expand_exact(x.to_rational()), max_terms))
    f0 = x.principal_part()
    parts: list = []
    zs = [x]
    cur, f = x, f0
    status = RUNNING
    while status == RUNNING:
        if len(parts) >= max_terms:
            status = BUDGET
            break
        r = cur - TruncatedSeries.from_poly(f)
        if not r.terms:
            status = PRECISION
            break
        nxt = r.invert()
        try:
            f = nxt.principal_part()
        except PrecisionExhausted:
            status = PRECISION
            break
        if not f.degree > 0:
            raise IdentityCheckFailed(f"partial {f} of nonpositive degree")
        parts.append(f)
        zs.append(nxt)
        cur = nxt
    return Expansion(CFExpression(f0, parts, False, status), tuple(zs))


def evaluate_exact(cf: CFExpression) -> RationalPuiseux:
    """Bottom-up exact evaluation of a finite expression."""
    seq = [cf.f0, *cf.partials]
    val = RationalPuiseux.from_poly(seq[-1])
    for f in reversed(seq[:-1]):
        assert not val.is_zero(), "zero denominator during evaluation"
        val = val.invert() + f
    return val


# -- approximants ----------------------------------------------------------------

@dataclass(frozen=True)
class ApproximantPair:
    index: int
    p: PuiseuxPoly
    q: PuiseuxPoly

    @property
    def value(self) -> RationalPuiseux:
        return reduce_fraction(self.p, self.q)

    def __str__(self):
        return f"x{self.index} = ({self.p})/({self.q})"


def approximants(cf, n: int | None = None) -> list:
    """``[(p_0, q_0), ..., (p_n, q_n)]``; ``n`` defaults to all available."""
    if isinstance(cf, LazyCF):
        if n is None:
            raise ValueError("a lazy expression needs an explicit n")
        cf = cf.prefix(n)
    avail = len(cf.partials)
    if n is None:
        n = avail
    if n > avail:
        raise IndexError(f"asked for x{n} but only {avail} partials are available")
    field = cf.field
    one = PuiseuxPoly.constant(field, 1)
    zero = PuiseuxPoly.zero(field)
    p2, q2, p1, q1 = zero, one, one, zero
    out = []
    for k in range(n + 1):
        f = cf[k]
        p, q = f * p1 + p2, f * q1 + q2
        out.append(ApproximantPair(k, p, q))
        p2, q2, p1, q1 = p1, q1, p, q
    return out


# -- values of (possibly infinite) expressions as streams --------------------------

DEFAULT_MAX_PARTIALS = 4096


def cf_value_stream(cf, max_partials: int = DEFAULT_MAX_PARTIALS) -> SeriesStream:
    """The element of K^ represented by ``cf`` as a lazy term stream.

    After computing ``x_n`` the terms of its expansion above exponent
    ``-(deg f_{n+1} + 2 deg q_n)`` are final and are emitted.  If the partial
    degrees are summable the exponents never reach ``-inf``; reading past the
    accumulation point raises :class:`BudgetExhausted` after
    ``max_partials`` partials.
    """
    lazy = as_lazy(cf)
    field = lazy.field

    def gen():
        frontier = INF
        one = PuiseuxPoly.constant(field, 1)
        p2, q2, p1, q1 = PuiseuxPoly.zero(field), one, one, PuiseuxPoly.zero(field)
        f = lazy.f0
        k = 0
        while True:
            p, q = f * p1 + p2, f * q1 + q2
            nxt = lazy.partial(k + 1)
            if nxt is None:
                for e, c in _long_division(field, p.terms, q.terms):
                    if e <= frontier:
                        yield e, c
                return
            bound = -(nxt.degree + 2 * q.degree)
            for e, c in _long_division(field, p.terms, q.terms):
                if e <= bound:
                    break
                if e <= frontier:
                    yield e, c
            # terms above the bound are final; later stages start at it
            frontier = bound
            k += 1
            if k > max_partials:
                raise BudgetExhausted(f"value of {lazy} needs more than {max_partials} partials")
            p2, q2, p1, q1 = p1, q1, p, q
            f = nxt

    return SeriesStream(field, gen, f"cf:{lazy}")


# -- identity checks -----------------------------------------------------------------

def _expansion_for(z, need: int, cutoff) -> CFExpression:
    if isinstance(z, (PuiseuxPoly, RationalPuiseux)):
        return expand_exact(z)
    if isinstance(z, CFExpression):
        return z
    return expand_stream(z, need, cutoff).cf


def _diff_valuation(z, x: RationalPuiseux, cutoff, deepen: int = 6):
    """Known valuation of ``z - x`` by series subtraction, deepening on demand."""
    if isinstance(z, (PuiseuxPoly, RationalPuiseux)):
        # exact: nu(a/b - p/q) = nu(a q - b p) - nu(b q), no series needed
        z = coerce_rational(z)
        num = z.num * x.den - z.den * x.num
        return num.valuation - (z.den * x.den).valuation
    d = stream_sub(as_stream(z), as_stream(x))
    c = Fraction(cutoff)
    for _ in range(deepen + 1):
        s = truncate(d, c)
        v = s.known_valuation()
        if v is not None:
            return v
        c = 2 * c - 10
    raise PrecisionExhausted(f"nu(z - x) is beyond exponent {-c}")


def error_valuation(z, n: int, cutoff=Fraction(-50), deepen: int = 6):
    """``nu(z - p_n/q_n)`` by direct subtraction, checked against the closed form.

    The closed form is ``deg f_{n+1} + 2 deg q_n``; ``deg q_n`` itself must
    equal the sum of the partial degrees.  Any disagreement raises
    :class:`IdentityCheckFailed`.
    """
    cf = _expansion_for(z, n + 1, cutoff)
    if len(cf.partials) < n + 1:
        if cf.status == ENDED:
            raise ValueError(f"expansion ends at index {len(cf.partials)}; f{n + 1} does not exist")
        raise PrecisionExhausted(f"only {len(cf.partials)} partials certified at cutoff {cutoff}")
    ap = approximants(cf, n)[-1]
    dsum = sum((f.degree for f in cf.partials[:n]), Fraction(0))
    if ap.q.degree != dsum:
        raise IdentityCheckFailed(f"deg q_{n} = {ap.q.degree} but the partial degrees sum to {dsum}")
    closed = cf.partials[n].degree + 2 * ap.q.degree
    direct = _diff_valuation(z, ap.value, cutoff, deepen)
    if direct != closed:
        raise IdentityCheckFailed(f"nu(z - x_{n}) = {direct} directly but {closed} from the degrees")
    return closed


def prefix_agreement_bound(z, z2, cutoff=Fraction(-50), max_terms: int = 32, check: bool = True) -> int:
    """Largest ``m`` such that ``nu(z - z2) > 2 (deg f_1 + ... + deg f_m)``.

    Returns ``-1`` when ``nu(z - z2) <= 0`` (no agreement is guaranteed).  If
    the difference vanishes to the available precision its lower bound
    ``-cutoff`` is used, which is sound.  With ``check`` the two expansions
    are compared through index ``m``.
    """
    d = truncate(stream_sub(as_stream(z), as_stream(z2)), cutoff)
    v = d.known_valuation()
    lower = v if v is not None else -d.cutoff
    if lower <= 0:
        if v is None:
            raise PrecisionExhausted("cannot certify nu(z - z') > 0")
        return -1
    cf = _expansion_for(z, max_terms, cutoff)
    m, total = 0, Fraction(0)
    for f in cf.partials:
        total += 2 * f.degree
        if total < lower:
            m += 1
        else:
            break
    if check:
        cf2 = _expansion_for(z2, m, cutoff)
        upto = min(m, len(cf2.partials))
        if cf2.f0 != cf.f0 or cf.partials[:upto] != cf2.partials[:upto]:
            raise IdentityCheckFailed(f"expansions disagree before index {m}")
    return m


@dataclass(frozen=True)
class ConvergenceVerdict:
    kind: str  # diverges-certified | converges-certified | inconclusive
    partial_sum: Fraction
    terms: int
    bound: Fraction | None = None

    def __str__(self):
        if self.kind == "converges-certified":
            return f"{self.kind}(bound {self.bound})"
        if self.kind == "diverges-certified":
            return f"{self.kind}(sum {self.partial_sum} after {self.terms} terms)"
        return f"{self.kind} (sum {self.partial_sum} after {self.terms} terms)"


def classify_convergence(degrees: Iterable, budget: int, threshold=None, bound=None) -> ConvergenceVerdict:
    """Classify ``sum deg f_i`` from finitely many terms.

    A caller-supplied ``bound`` certifies convergence (checked against every
    inspected partial sum).  Otherwise reaching ``threshold`` certifies
    divergence in the sense of the caller; anything else is inconclusive.
    """
    total = Fraction(0)
    k = 0
    for d in degrees:
        if k >= budget:
            break
        d = Fraction(d)
        if not d > 0:
            raise InvalidElement(f"degree {d} is not positive")
        total += d
        k += 1
        if bound is not None and total > bound:
            raise BadCertificate(f"partial sum {total} exceeds the bound {bound} after {k} terms")
        if bound is None and threshold is not None and total >= threshold:
            return ConvergenceVerdict("diverges-certified", total, k)
    if bound is not None:
        return ConvergenceVerdict("converges-certified", total, k, Fraction(bound))
    return ConvergenceVerdict("inconclusive", total, k)


@dataclass(frozen=True)
class BestApproximation:
    kind: str  # is-approximant | not-better
    index: int | None = None
    valuation: object = None

    def __str__(self):
        return f"is-approximant({self.index})" if self.kind == "is-approximant" else "not-better"


def best_approximation_check(z, p: PuiseuxPoly, q: PuiseuxPoly, cutoff=Fraction(-50), max_terms: int = 64):
    """Decide whether ``p/q`` beats ``2 deg q`` and if so find its index.

    ``p/q`` is reduced first, so ``deg q`` refers to the comaximal
    denominator.
    """
    if q.is_zero():
        raise ZeroDivisionError("q = 0")
    x = reduce_fraction(p, q)
    dq = x.den.degree
    d = truncate(stream_sub(as_stream(z), as_stream(x)), cutoff)
    if not d.valuation_greater(2 * dq):
        return BestApproximation("not-better", valuation=d.known_valuation())
    cf = _expansion_for(z, max_terms, cutoff)
    for ap in approximants(cf):
        if ap.q.degree > dq:
            break
        if ap.value == x:
            return BestApproximation("is-approximant", ap.index, d.known_valuation())
    else:
        if cf.status != ENDED:
            raise BudgetExhausted(f"x_n with deg q_n >= {dq} not reached within {len(cf.partials)} partials")
    raise IdentityCheckFailed(f"{x} beats 2 deg q but is not an approximant")


# -- periodicity -----------------------------------------------------------------------

@dataclass(frozen=True)
class Periodicity:
    preperiod: int
    period: int
    a: PuiseuxPoly
    b: PuiseuxPoly
    c: PuiseuxPoly
    residual: object  # proven lower bound for nu(a z^2 + b z + c)
    threshold: Fraction
    verified: bool

    @property
    def verdict(self) -> str:
        return "verified" if self.verified else "heuristic"

    def quadratic(self) -> str:
        return f"({self.a})*z^2 + ({self.b})*z + ({self.c})"

    def to_json(self) -> dict:
        return {
            "preperiod": self.preperiod,
            "period": self.period,
            "a": str(self.a),
            "b": str(self.b),
            "c": str(self.c),
            "residual": "inf" if self.residual == INF else str(self.residual),
            "threshold": str(self.threshold),
            "verdict": self.verdict,
        }


def find_period(seq: Sequence, max_period: int):
    """Smallest ``(s, l)`` with ``seq[i] == seq[i+l]`` for all ``i >= s``.

    At least two full periods must be visible; ``seq`` includes ``f0``.
    """
    N = len(seq)
    for s in range(N):
        for ell in range(1, max_period + 1):
            if N - s < 2 * ell:
                break
            if all(seq[i] == seq[i + ell] for i in range(s, N - ell)):
                return s, ell
    return None


def period_quadratic(seq: Sequence, s: int, ell: int):
    """Coefficients ``a, b, c`` of a quadratic satisfied by the periodic value."""
    block = CFExpression(seq[s], seq[s + 1 : s + ell], True)
    bl = approximants(block)
    field = seq[0].field
    one, zero = PuiseuxPoly.constant(field, 1), PuiseuxPoly.zero(field)
    # convergents with the seeds at index -1 and -2
    P = bl[ell - 1].p
    Q = bl[ell - 1].q
    Pp = bl[ell - 2].p if ell >= 2 else one
    Qp = bl[ell - 2].q if ell >= 2 else zero
    if s == 0:
        alpha, beta, gamma, delta = -one, zero, zero, -one
    else:
        head = approximants(CFExpression(seq[0], seq[1:s], True))
        p1, q1 = head[s - 1].p, head[s - 1].q
        p2, q2 = (head[s - 2].p, head[s - 2].q) if s >= 2 else (one, zero)
        alpha, beta, gamma, delta = -q2, p2, q1, -p1
    u = Qp - P
    a = Q * alpha * alpha + u * alpha * gamma - Pp * gamma * gamma
    b = 2 * Q * alpha * beta + u * (alpha * delta + beta * gamma) - 2 * Pp * gamma * delta
    c = Q * beta * beta + u * beta * delta - Pp * delta * delta
    return a, b, c


def quadratic_residual(a, b, c, z, cutoff=Fraction(-50)):
    """Proven lower bound for ``nu(a z^2 + b z + c)`` (``inf`` when exact zero)."""
    if isinstance(z, (PuiseuxPoly, RationalPuiseux)):
        x = coerce_rational(z)
        return (a * x * x + b * x + c).valuation
    if isinstance(z, TruncatedSeries):
        s = z
    else:
        # multiplying by a and b costs precision; pull deeper to compensate
        s0 = truncate(z, cutoff)
        dz = s0.leading_exponent if s0.terms else Fraction(0)
        extra = max(a.degree + dz, b.degree, Fraction(0))
        s = truncate(z, Fraction(cutoff) - extra)
    r = s * s * a + s * b + c
    return r.valuation_lower_bound()


def detect_periodicity(cf: CFExpression, max_period: int, z=None, cutoff=Fraction(-50),
                       margin=10, threshold=None):
    """Find an eventual period in ``cf`` and test the induced quadratic.

    The match is verified when the residual at ``z`` (a stream or exact value;
    by default the last available approximant) provably exceeds the threshold
    ``2 deg(b^2 - 4ac) + margin``.  Returns ``None`` when nothing repeats.
    """
    seq = [cf.f0, *cf.partials]
    found = find_period(seq, max_period)
    if found is None:
        return None
    s, ell = found
    a, b, c = period_quadratic(seq, s, ell)
    if threshold is None:
        disc = b * b - 4 * a * c
        threshold = 2 * max(disc.degree, Fraction(0)) + margin
    threshold = Fraction(threshold)
    target = z if z is not None else evaluate_exact(cf.prefix(len(cf.partials)))
    res = quadratic_residual(a, b, c, target, cutoff)
    return Periodicity(s, ell, a, b, c, res, threshold, res > threshold)
