"""Nested sequences of closed balls with empty intersection.

Two certified families are provided:

* ``from_convergent_cf``: balls around the approximants of an infinite
  expression whose partial degrees have a finite sum (type IVa data);
* ``e69_sequence``: balls around ``b_n = t^r(1) + ... + t^r(n)`` of radius
  ``-r(n+1)`` for a strictly decreasing positive schedule ``r`` (type IVb
  data; no ball ever has a positive radius parameter).

Sequences are memoized and check nesting as each ball is produced.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, Iterator

from .algebra import INF, PuiseuxPoly
from .berkovich import (
    ACCUMULATES,
    Ball,
    CLOSED,
    PrefixRep,
    Promenade,
    prefix_representation,
    promenade_from_degrees,
)
from .cf import LazyCF, approximants, classify_convergence
from .errors import BadCertificate, BudgetExhausted, InvalidElement, NestingViolation, Undecided
from .fields import Field, QQ
from .series import TruncatedSeries

CF_CONVERGENT = "cf-convergent"
E69 = "e69-family"
RAW = "raw"


@dataclass(frozen=True)
class Certificate:
    kind: str
    bound: Fraction | None = None  # summability bound for cf-convergent
    schedule: str | None = None  # schedule text for e69-family
    data: dict = dc_field(default_factory=dict)

    @property
    def radius_limit(self):
        if self.kind == CF_CONVERGENT:
            return 2 * self.bound
        if self.kind == E69:
            return self.data.get("radius_limit", Fraction(0))
        return None

    def __str__(self):
        if self.kind == CF_CONVERGENT:
            return f"{self.kind}(sum of degrees <= {self.bound})"
        if self.kind == E69:
            return f"{self.kind}(r = {self.schedule})"
        return self.kind


class NestedBallSeq:
    """Balls ``B_1, B_2, ...`` (1-based), produced lazily and checked for nesting."""

    def __init__(self, source: Callable[[], Iterator[Ball]], certificate: Certificate,
                 label: str = "", cf: LazyCF | None = None):
        self.certificate = certificate
        self.label = label
        self.cf = cf
        self._source = source
        self._it = None
        self._balls: list = []
        self._ended = False
        self._lock = threading.Lock()

    @classmethod
    def raw(cls, balls, label: str = "raw") -> "NestedBallSeq":
        balls = tuple(balls)
        return cls(lambda: iter(balls), Certificate(RAW), label)

    def ball(self, n: int):
        """``B_n`` or ``None`` past the end of a finite sequence."""
        if n < 1:
            raise IndexError("balls are numbered from 1")
        with self._lock:
            while len(self._balls) < n and not self._ended:
                if self._it is None:
                    self._it = iter(self._source())
                try:
                    b = next(self._it)
                except StopIteration:
                    self._ended = True
                    break
                if b.kind != CLOSED:
                    raise InvalidElement("nested sequences consist of closed balls")
                if self._balls and not self._balls[-1].contains_ball(b):
                    raise NestingViolation(f"B_{len(self._balls) + 1} = {b} is not inside {self._balls[-1]}")
                self._balls.append(b)
            return self._balls[n - 1] if n <= len(self._balls) else None

    def balls(self, N: int) -> list:
        out = []
        for n in range(1, N + 1):
            b = self.ball(n)
            if b is None:
                break
            out.append(b)
        return out

    def __str__(self):
        return self.label or "<nested balls>"


def from_convergent_cf(cf: LazyCF, bound, check_terms: int = 64) -> NestedBallSeq:
    """``B_n`` = closed ball of radius ``2(deg f_1 + ... + deg f_n)`` around ``x_n``.

    The summability ``bound`` is checked against the first ``check_terms``
    partial sums up front and against every later ball as it is produced.
    """
    bound = Fraction(bound)
    degrees = []
    for i in range(1, check_terms + 1):
        f = cf.partial(i)
        if f is None:
            raise InvalidElement("a type IV sequence needs an infinite expression")
        degrees.append(f.degree)
    classify_convergence(degrees, check_terms, bound=bound)

    def gen():
        total = Fraction(0)
        n = 0
        while True:
            n += 1
            f = cf.partial(n)
            if f is None:
                return
            total += f.degree
            if total > bound:
                raise BadCertificate(f"partial sum {total} exceeds the bound {bound} at n = {n}")
            x = approximants(cf, n)[-1].value
            yield Ball(x, 2 * total, CLOSED)

    cert = Certificate(CF_CONVERGENT, bound=bound)
    return NestedBallSeq(gen, cert, f"iva:{cf}", cf)


def monomial_cf(degrees: Callable[[int], Fraction], field: Field = QQ, label: str = "") -> LazyCF:
    """``[0; t^D(1), t^D(2), ...]``."""

    def gen():
        i = 0
        while True:
            i += 1
            yield PuiseuxPoly.monomial(field, degrees(i))

    return LazyCF(PuiseuxPoly.zero(field), gen, label or "[0; t^D(1), t^D(2), ...]")


# -- schedules --------------------------------------------------------------------------------

_RAT = r"(\d+(?:/\d+)?)"


@dataclass(frozen=True)
class Schedule:
    """A rational sequence ``r(1), r(2), ...`` given by a small formula."""

    text: str
    fn: Callable[[int], Fraction]
    limit: Fraction

    def __call__(self, i: int) -> Fraction:
        return self.fn(i)

    def __str__(self):
        return self.text


def parse_schedule(text: str) -> Schedule:
    """Forms: ``c/i``, ``c/i^k``, ``b^-i``, ``c*b^-i``, or a constant ``c``."""
    s = text.replace(" ", "")
    m = re.fullmatch(_RAT + r"?/i(?:\^(\d+))?", s)
    if m:
        c = Fraction(m.group(1) or 1)
        k = int(m.group(2) or 1)
        return Schedule(s, lambda i: c / Fraction(i) ** k, Fraction(0))
    m = re.fullmatch(r"(?:" + _RAT + r"\*)?" + _RAT + r"\^-i", s)
    if m:
        c = Fraction(m.group(1) or 1)
        b = Fraction(m.group(2))
        return Schedule(s, lambda i: c / b ** i, Fraction(0))
    m = re.fullmatch(_RAT, s)
    if m:
        c = Fraction(m.group(1))
        return Schedule(s, lambda i: c, c)
    raise ValueError(f"bad schedule {text!r}; expected c/i, c/i^k, b^-i, c*b^-i or a constant")


DEFAULT_E69 = "1/i"


def _check_schedule(r: Schedule, upto: int):
    prev = None
    for i in range(1, upto + 1):
        v = r(i)
        if not v > 0:
            raise InvalidElement(f"schedule value r({i}) = {v} is not positive")
        if prev is not None and not v < prev:
            raise InvalidElement(f"schedule is not strictly decreasing at i = {i}: {prev} then {v}")
        prev = v


def e69_sequence(schedule: Schedule | str = DEFAULT_E69, N: int | None = None, field: Field = QQ,
                 check_terms: int = 16) -> NestedBallSeq:
    """Closed balls around ``b_n = sum_{i<=n} t^r(i)`` with radius ``-r(n+1)``."""
    r = parse_schedule(schedule) if isinstance(schedule, str) else schedule
    _check_schedule(r, check_terms + 1)

    def gen():
        center = TruncatedSeries(field, (), -INF)
        n = 0
        prev = None
        while N is None or n < N:
            n += 1
            e = r(n)
            nxt = r(n + 1)
            if not (0 < nxt < e) or (prev is not None and not e < prev):
                raise InvalidElement(f"schedule is not strictly decreasing and positive at i = {n}")
            prev = e
            center = center + TruncatedSeries(field, ((e, field.one),), -INF)
            yield Ball(center, -nxt, CLOSED)

    cert = Certificate(E69, schedule=str(r), data={"radius_limit": -r.limit})
    label = "e69" if str(r) == DEFAULT_E69 else f"e69:{r}"
    return NestedBallSeq(gen, cert, label)


# -- certification helpers ----------------------------------------------------------------------

@dataclass(frozen=True)
class Exclusion:
    kind: str  # excluded-at | inconclusive
    index: int | None = None

    def __str__(self):
        return f"excluded-at({self.index})" if self.kind == "excluded-at" else "inconclusive"


def exclude_point(seq: NestedBallSeq, z, depth: int) -> Exclusion:
    """First ``n <= depth`` with ``z`` outside ``B_n``."""
    for n in range(1, depth + 1):
        b = seq.ball(n)
        if b is None:
            break
        if not b.contains(z):
            return Exclusion("excluded-at", n)
    return Exclusion("inconclusive")


class GrowingPrefix(BudgetExhausted):
    """Prefixes kept growing within the inspection budget (type IVa behaviour)."""

    verdict = "IVa"


@dataclass(frozen=True)
class IVbWitness:
    prefix: object  # CFExpression or None (empty prefix)
    reps: tuple  # PrefixRep per inspected ball
    verdict: str  # IVb | inconclusive
    stable_from: int

    @property
    def D(self) -> tuple:
        return tuple(rep.D for rep in self.reps)

    def __str__(self):
        pre = "[]" if self.prefix is None else str(self.prefix)
        return f"{pre} ({self.verdict}, stable from n = {self.stable_from})"


def _key(rep: PrefixRep):
    return None if rep.cf is None else (rep.cf.f0, rep.cf.partials)


def ivb_witness(seq: NestedBallSeq, budget: int = 12) -> IVbWitness:
    """Longest prefix ``cf`` with ``B_n`` inside ``B_cf``, once it stabilizes.

    The prefixes of the last half of the inspected balls must agree.
    """
    balls = seq.balls(budget)
    if not balls:
        raise InvalidElement("empty sequence")
    if seq.certificate.kind == CF_CONVERGENT:
        # B_n is centred at x_n, whose expression is the n-th prefix of seq.cf
        reps = [prefix_representation(b, seq.cf.prefix(n)) for n, b in enumerate(balls, 1)]
    else:
        reps = [prefix_representation(b) for b in balls]
    keys = [_key(rep) for rep in reps]
    half = len(keys) // 2
    tail = keys[half:]
    if any(k != tail[0] for k in tail):
        raise GrowingPrefix(
            f"prefixes still change after {len(balls)} balls "
            f"(lengths {[0 if k is None else len(k[1]) + 1 for k in keys]}); consistent with type IVa"
        )
    start = len(keys) - 1
    while start > 0 and keys[start - 1] == keys[-1]:
        start -= 1
    verdict = "IVb" if seq.certificate.kind == E69 else "inconclusive"
    return IVbWitness(reps[-1].cf, tuple(reps), verdict, start + 1)


def promenade_of_sequence(seq: NestedBallSeq, N: int = 16) -> Promenade:
    """Promenade toward the type IV point defined by ``seq``."""
    cert = seq.certificate
    if cert.kind == CF_CONVERGENT:
        degrees = []
        for i in range(1, N + 1):
            f = seq.cf.partial(i)
            if f is None:
                break
            degrees.append(f.degree)
        pm = promenade_from_degrees(degrees, False, tail=ACCUMULATES)
        return Promenade(pm.breakpoints, ACCUMULATES, pm.breakpoints[-1][0])
    if cert.kind == E69:
        return Promenade(((Fraction(0), Fraction(0)),), ACCUMULATES, cert.radius_limit)
    raise Undecided("promenades of raw sequences are not classified")
