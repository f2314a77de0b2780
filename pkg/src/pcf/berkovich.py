"""The Berkovich half-plane over the completed Puiseux field.

A point ``eta(a, r)`` is the class of pairs with ``(a, r) ~ (a', r)`` iff
``nu(a - a') >= r``.  Only the terms of ``a`` with exponent ``> -r`` matter,
so a point stores exactly those: its *canonical center*, a finite sum.
Equality, distance and the group action are then exact computations.

Radii are rationals (type II points).  Group elements are words in

* ``i``          z -> 1/z
* ``m(d1,d2,f)`` z -> (d1 z + f)/d2      (``t(f)`` is ``m(1,1,f)``)

with entries in k~.  Word tuples are stored in application order; the text
form ``A*B*C`` is the matrix product, so ``C`` acts first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import _terms
from .algebra import INF, PuiseuxPoly, RationalPuiseux, coerce_rational
from .cf import CFExpression, LazyCF, approximants, evaluate_exact, expand_exact, expand_stream
from .errors import BudgetExhausted, InvalidElement, PrecisionExhausted, IdentityCheckFailed
from .fields import Field, ModP, QQ
from .series import TruncatedSeries, as_stream, series_invert, stream_sub, to_series, truncate


def _canonical_terms(a, bound: Fraction, inclusive: bool, field: Field | None = None) -> tuple:
    """Terms of ``a`` with exponent ``> bound`` (``>= bound`` if inclusive)."""
    if isinstance(a, (int, Fraction, ModP)):
        a = PuiseuxPoly.constant(field or QQ, a)
    cut = bound - 1 if inclusive else bound
    s = to_series(a, cut)
    if s.cutoff > cut:
        raise PrecisionExhausted(f"center known only above {s.cutoff}; need terms down to {bound}")
    if inclusive:
        return s.field, tuple((e, c) for e, c in s.terms if e >= bound)
    return s.field, tuple((e, c) for e, c in s.terms if e > bound)


def _rational_of(field: Field, terms: tuple) -> RationalPuiseux:
    return TruncatedSeries(field, terms, -INF).to_rational()


def _nu(terms: tuple):
    return -terms[0][0] if terms else INF


class BerkPoint:
    """``eta(a, r)`` with its canonical center."""

    __slots__ = ("field", "center", "radius")

    def __init__(self, center, radius, field: Field | None = None):
        radius = Fraction(radius)
        f, terms = _canonical_terms(center, -radius, False, field)
        self.field = f
        self.center = terms
        self.radius = radius

    @classmethod
    def _raw(cls, field: Field, terms: tuple, radius: Fraction) -> "BerkPoint":
        obj = object.__new__(cls)
        obj.field = field
        obj.center = _terms.keep_above(terms, -radius)
        obj.radius = radius
        return obj

    @property
    def center_series(self) -> TruncatedSeries:
        return TruncatedSeries(self.field, self.center, -INF)

    def center_value(self) -> RationalPuiseux:
        return _rational_of(self.field, self.center)

    def __eq__(self, other):
        if not isinstance(other, BerkPoint):
            return NotImplemented
        return self.radius == other.radius and self.center == other.center

    def __hash__(self):
        return hash((self.center, self.radius))

    def __str__(self):
        return f"eta({_terms.render(self.field, self.center)}, {self.radius})"

    __repr__ = __str__


def _diff_nu(a: BerkPoint, b: BerkPoint):
    return _nu(_terms.add(a.center, _terms.neg(b.center)))


def distance(p: BerkPoint, q: BerkPoint) -> Fraction:
    v = _diff_nu(p, q)
    if v >= min(p.radius, q.radius):
        return abs(p.radius - q.radius)
    return p.radius + q.radius - 2 * v


def join(p: BerkPoint, q: BerkPoint) -> BerkPoint:
    r = min(p.radius, q.radius, _diff_nu(p, q))
    return BerkPoint._raw(p.field, p.center, Fraction(r))


def lies_above(p: BerkPoint, q: BerkPoint) -> bool:
    """``p`` lies above ``q``: ``r_p <= r_q`` and ``r_p <= nu(a_p - a_q)``."""
    return p.radius <= q.radius and p.radius <= _diff_nu(p, q)


# -- group elements ------------------------------------------------------------------

def _k(x, field: Field) -> RationalPuiseux:
    return coerce_rational(x, field)


@dataclass(frozen=True)
class Gen:
    kind: str  # "i" or "m"
    d1: RationalPuiseux | None = None
    d2: RationalPuiseux | None = None
    f: RationalPuiseux | None = None

    def matrix(self, field: Field):
        one, zero = _k(1, field), _k(0, field)
        if self.kind == "i":
            return ((zero, one), (one, zero))
        return ((self.d1, self.f), (zero, self.d2))

    def __str__(self):
        if self.kind == "i":
            return "i"
        if self.d1 == 1 and self.d2 == 1:
            return f"t({self.f})"
        return f"m({self.d1}, {self.d2}, {self.f})"


I = Gen("i")


def gen_m(d1, d2, f, field: Field = QQ) -> Gen:
    d1, d2, f = _k(d1, field), _k(d2, field), _k(f, field)
    if d1.is_zero() or d2.is_zero():
        raise InvalidElement("m(d1, d2, f) needs d1, d2 nonzero")
    return Gen("m", d1, d2, f)


def gen_t(f, field: Field = QQ) -> Gen:
    return gen_m(1, 1, f, field)


def _matmul(A, B):
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


class MobiusElt:
    """A word of generators, stored in application order."""

    __slots__ = ("field", "word")

    def __init__(self, word: Iterable[Gen] = (), field: Field = QQ):
        self.field = field
        self.word = tuple(word)

    @classmethod
    def from_product(cls, factors: Sequence[Gen], field: Field = QQ) -> "MobiusElt":
        """Word from a matrix product ``A*B*C`` (``C`` acts first)."""
        return cls(tuple(reversed(factors)), field)

    @classmethod
    def from_matrix(cls, a, b, c, d, field: Field = QQ) -> "MobiusElt":
        """Factor ``(a b; c d)`` into ``m``, or ``m * i * m`` when ``c != 0``."""
        a, b, c, d = (_k(x, field) for x in (a, b, c, d))
        det = a * d - b * c
        if det.is_zero():
            raise InvalidElement("singular matrix")
        if c.is_zero():
            return cls((gen_m(a, d, b, field),), field)
        return cls((gen_m(c, 1, d, field), I, gen_m(-det / c, 1, a / c, field)), field)

    def then(self, other: "MobiusElt") -> "MobiusElt":
        """Apply ``self`` first, then ``other``."""
        return MobiusElt(self.word + other.word, self.field)

    def __mul__(self, other: "MobiusElt") -> "MobiusElt":
        # matrix product: other acts first
        return MobiusElt(other.word + self.word, self.field)

    def matrix(self):
        one, zero = _k(1, self.field), _k(0, self.field)
        M = ((one, zero), (zero, one))
        for g in self.word:
            M = _matmul(g.matrix(self.field), M)
        return M

    def determinant(self) -> RationalPuiseux:
        M = self.matrix()
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]

    def inverse(self) -> "MobiusElt":
        inv = []
        for g in reversed(self.word):
            if g.kind == "i":
                inv.append(I)
            else:
                # z -> (d1 z + f)/d2 inverts to z -> (d2 z - f)/d1
                inv.append(Gen("m", g.d2, g.d1, -g.f))
        return MobiusElt(inv, self.field)

    def __str__(self):
        if not self.word:
            return "id"
        return "*".join(str(g) for g in reversed(self.word))

    __repr__ = __str__


def _act_gen(g: Gen, p: BerkPoint) -> BerkPoint:
    field, r = p.field, p.radius
    if g.kind == "i":
        v = _nu(p.center)
        if v < r:
            r2 = r - 2 * v
            inv = series_invert(TruncatedSeries(field, p.center, -INF), cutoff=-r2)
            return BerkPoint._raw(field, inv.terms, r2)
        return BerkPoint._raw(field, (), -r)
    a = _rational_of(field, p.center)
    new = (g.d1 * a + g.f) / g.d2
    return BerkPoint(new, r + g.d1.valuation - g.d2.valuation)


def act(g, p: BerkPoint) -> BerkPoint:
    if isinstance(g, Gen):
        return _act_gen(g, p)
    for x in g.word:
        p = _act_gen(x, p)
    return p


def act_value(g, z):
    """Action on an element of k~ (a type I point), for cross-checks."""
    z = coerce_rational(z)
    word = (g,) if isinstance(g, Gen) else g.word
    for x in word:
        if x.kind == "i":
            z = z.invert()
        else:
            z = (x.d1 * z + x.f) / x.d2
    return z


# -- reduction to the modular ray ------------------------------------------------------

def _neg_gen(field: Field) -> Gen:
    return gen_m(-1, 1, 0, field)


@dataclass(frozen=True)
class Reduction:
    v: Fraction
    witness: MobiusElt
    steps: int

    def __str__(self):
        return f"{self.v}"


def reduce_to_ray(p: BerkPoint, max_steps: int = 10_000) -> Reduction:
    """``v >= 0`` and a determinant-one word ``g`` with ``g * p = eta(0, -v)``.

    Each round translates by the principal part; if the radius is still
    positive it inverts (followed by ``z -> -z`` to keep determinant one).
    """
    field = p.field
    word: list = []
    neg = _neg_gen(field)
    cur = p
    for step in range(max_steps):
        f = PuiseuxPoly._raw(field, tuple((e, c) for e, c in cur.center if e >= 0))
        if f:
            g = gen_t(-f, field)
            word.append(g)
            cur = _act_gen(g, cur)
        r = cur.radius
        if r <= 0:
            return Reduction(-r, MobiusElt(word, field), step)
        done = _nu(cur.center) >= r
        word.append(I)
        cur = _act_gen(I, cur)
        word.append(neg)
        cur = _act_gen(neg, cur)
        if done:
            return Reduction(r, MobiusElt(word, field), step)
    raise BudgetExhausted(f"reduction did not reach the ray within {max_steps} rounds")


def ray_value_from_degrees(degrees: Sequence, ended: bool, r) -> Fraction:
    """Closed form of the reduction height from the center's partial degrees."""
    r = Fraction(r)
    if r <= 0:
        return -r
    T = Fraction(0)
    for d in degrees:
        if T + 2 * d <= r:
            T += 2 * d
            continue
        return d - abs(r - T - d)
    if not ended:
        raise BudgetExhausted("not enough partial degrees for this radius")
    return r - T


# -- promenades ---------------------------------------------------------------------------

ASCENDS = "ascends-forever"
TRUNCATED = "truncated-at-budget"
ACCUMULATES = "accumulates"


@dataclass(frozen=True)
class Promenade:
    """Piecewise-linear trajectory; ``w(t) = -t`` for ``t <= 0``.

    ``breakpoints`` start at ``(0, 0)`` and alternate between zeros and
    maxima.  ``tail`` describes what follows the last breakpoint.
    """

    breakpoints: tuple
    tail: str
    domain_end: Fraction | None = None

    @property
    def maxima(self) -> tuple:
        return tuple(bp for k, bp in enumerate(self.breakpoints) if k % 2 == 1)

    @property
    def zeros(self) -> tuple:
        return tuple(bp for k, bp in enumerate(self.breakpoints) if k % 2 == 0)

    def value_at(self, t) -> Fraction:
        t = Fraction(t)
        if t <= 0:
            return -t
        bps = self.breakpoints
        for (t0, v0), (t1, v1) in zip(bps, bps[1:]):
            if t0 <= t <= t1:
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        tl, vl = bps[-1]
        if self.tail == ASCENDS:
            return vl + (t - tl)
        raise BudgetExhausted(f"promenade known only up to t = {tl}")

    def to_tsv(self) -> str:
        lines = ["t\tv"]
        lines += [f"{t}\t{v}" for t, v in self.breakpoints]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "breakpoints": [[str(t), str(v)] for t, v in self.breakpoints],
            "tail": self.tail,
            "domain_end": None if self.domain_end is None else str(self.domain_end),
        }

    def to_svg(self, width: int = 640, height: int = 320) -> str:
        return _svg(self, width, height)

    def __str__(self):
        pts = ", ".join(f"({t}, {v})" for t, v in self.breakpoints)
        extra = f", end {self.domain_end}" if self.domain_end is not None else ""
        return f"{pts} ({self.tail}{extra})"


def promenade_from_degrees(degrees: Sequence, ended: bool, t_max=None, tail: str | None = None,
                           domain_end=None) -> Promenade:
    """Zeros at ``T_n`` and maxima ``D_{n+1}`` at ``T_n + D_{n+1}``."""
    bps = [(Fraction(0), Fraction(0))]
    T = Fraction(0)
    cut = False
    for d in degrees:
        d = Fraction(d)
        if t_max is not None and T >= t_max:
            cut = True
            break
        bps.append((T + d, d))
        T += 2 * d
        bps.append((T, Fraction(0)))
    if tail is None:
        tail = ASCENDS if ended and not cut else TRUNCATED
    return Promenade(tuple(bps), tail, None if domain_end is None else Fraction(domain_end))


def promenade(u, t_max=None, max_terms: int = 32, cutoff=Fraction(-50)) -> Promenade:
    """Promenade toward a type I point given as an exact value, CF or stream."""
    if isinstance(u, CFExpression):
        cf = u
    elif isinstance(u, LazyCF):
        cf = u.prefix(max_terms)
    elif isinstance(u, (PuiseuxPoly, RationalPuiseux)):
        cf = expand_exact(u)
    else:
        cf = expand_stream(u, max_terms, cutoff).cf
    ended = cf.finite and cf.status == "ended"
    return promenade_from_degrees(cf.degrees, ended, t_max)


def _svg(pm: Promenade, width: int, height: int) -> str:
    pts = list(pm.breakpoints)
    t_lo = Fraction(-1)
    t_hi = max(pts[-1][0], Fraction(1))
    if pm.tail == ASCENDS:
        t_hi += max(Fraction(1), t_hi / 4)
    v_hi = max([v for _, v in pts] + [Fraction(1)])
    if pm.tail == ASCENDS:
        v_hi = max(v_hi, pm.value_at(t_hi))
    v_hi = max(v_hi, -t_lo)
    pad = 40
    sx = (width - 2 * pad) / float(t_hi - t_lo)
    sy = (height - 2 * pad) / float(v_hi)

    def X(t):
        return pad + float(t - t_lo) * sx

    def Y(v):
        return height - pad - float(v) * sy

    poly = [(t_lo, -t_lo)] + pts
    if pm.tail == ASCENDS:
        poly.append((t_hi, pm.value_at(t_hi)))
    coords = " ".join(f"{X(t):.2f},{Y(v):.2f}" for t, v in poly)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<line x1="{pad}" y1="{Y(0):.2f}" x2="{width - pad}" y2="{Y(0):.2f}" stroke="#888"/>',
        f'<line x1="{X(0):.2f}" y1="{pad}" x2="{X(0):.2f}" y2="{height - pad}" stroke="#888"/>',
    ]
    for t, v in pm.zeros:
        out.append(f'<line x1="{X(t):.2f}" y1="{Y(0) - 4:.2f}" x2="{X(t):.2f}" y2="{Y(0) + 4:.2f}" stroke="#000"/>')
        out.append(f'<text x="{X(t):.2f}" y="{Y(0) + 16:.2f}" font-size="10" text-anchor="middle">{t}</text>')
    for t, v in pm.maxima:
        out.append(f'<text x="{X(t):.2f}" y="{Y(v) - 6:.2f}" font-size="10" text-anchor="middle">{v}</text>')
    out.append(f'<polyline fill="none" stroke="#1f5fbf" stroke-width="1.5" points="{coords}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- balls ------------------------------------------------------------------------------------

OPEN = "open"
CLOSED = "closed"


class Ball:
    """``{b : nu(b - a) > r}`` (open) or ``{b : nu(b - a) >= r}`` (closed)."""

    __slots__ = ("field", "center", "radius", "kind")

    def __init__(self, center, radius, kind: str = CLOSED, field: Field | None = None):
        if kind not in (OPEN, CLOSED):
            raise ValueError(f"ball kind must be open or closed, not {kind!r}")
        radius = Fraction(radius)
        f, terms = _canonical_terms(center, -radius, kind == OPEN, field)
        self.field = f
        self.center = terms
        self.radius = radius
        self.kind = kind

    def center_value(self) -> RationalPuiseux:
        return _rational_of(self.field, self.center)

    @property
    def point(self) -> BerkPoint:
        """The point ``eta(a, r)`` (the closed ball with the same data)."""
        return BerkPoint._raw(self.field, self.center, self.radius)

    def closure(self) -> "Ball":
        return Ball(TruncatedSeries(self.field, self.center, -INF), self.radius, CLOSED)

    def contains(self, z, extra: int = 1) -> bool:
        """Membership of an element given exactly or as a stream."""
        cut = -self.radius - extra
        d = truncate(stream_sub(as_stream(z), as_stream(TruncatedSeries(self.field, self.center, -INF))), cut)
        if self.kind == CLOSED:
            return d.valuation_at_least(self.radius)
        return d.valuation_greater(self.radius)

    def contains_ball(self, other: "Ball") -> bool:
        v = _nu(_terms.add(self.center, _terms.neg(other.center)))
        if self.kind == CLOSED:
            return other.radius >= self.radius and v >= self.radius
        if other.kind == OPEN:
            return other.radius >= self.radius and v > self.radius
        return other.radius > self.radius and v > self.radius

    def __eq__(self, other):
        if not isinstance(other, Ball):
            return NotImplemented
        return (self.kind, self.radius, self.center) == (other.kind, other.radius, other.center)

    def __hash__(self):
        return hash((self.kind, self.radius, self.center))

    def __str__(self):
        tag = "ballo" if self.kind == OPEN else "ballc"
        return f"{tag}({_terms.render(self.field, self.center)}, {self.radius})"

    __repr__ = __str__


def ball_of_prefix(cf: CFExpression) -> Ball:
    """Open ball of all elements whose expansion starts with ``cf``."""
    r = 2 * sum(cf.degrees, Fraction(0))
    return Ball(evaluate_exact(cf.prefix(len(cf.partials))), r, OPEN)


def rho_word(cf: CFExpression, n: int) -> MobiusElt:
    """Word for ``z -> z_{n+1}``: translate by ``-f_k`` then invert, ``k = 0..n``."""
    field = cf.field
    word = []
    for k in range(n + 1):
        f = cf[k]
        if f:
            word.append(gen_t(-f, field))
        word.append(I)
    return MobiusElt(word, field)


@dataclass(frozen=True)
class PrefixRep:
    cf: CFExpression | None  # None when no stage is split off
    D: Ball
    word: MobiusElt

    def __str__(self):
        pre = "[]" if self.cf is None else str(self.cf)
        return f"{pre} - {self.D}"


def _split_index(cf: CFExpression, r):
    """Count of partials with ``2 (deg f_1 + ... + deg f_n) < r``, or None if undecided."""
    n, T = 0, Fraction(0)
    for d in cf.degrees:
        if not T + 2 * d < r:
            return n
        T += 2 * d
        n += 1
    return n if cf.finite else None


def _prefix_partials(B: Ball, r):
    # expand truncations of the center, deepening until the split index is
    # decided or the expansion provably reproduces the center exactly
    center = TruncatedSeries(B.field, B.center, -INF)
    c = -r - 4
    while True:
        cf = expand_stream(TruncatedSeries(B.field, B.center, c), 10**9, c).cf
        n = _split_index(cf, r)
        if n is not None:
            return cf, n
        p, q = approximants(cf)[-1].p, approximants(cf)[-1].q
        if not (center * q - p).terms:
            cf = CFExpression(cf.f0, cf.partials, True)
            return cf, _split_index(cf, r)
        c = 2 * c - 10


def prefix_representation(B: Ball, hint: CFExpression | None = None) -> PrefixRep:
    """Split a closed ball into a CF prefix and a ball of radius parameter ``<= 0``.

    ``hint`` may give the finite expression of some element of ``B``; it saves
    re-expanding the center when that is expensive and is trusted as given.
    """
    if B.kind != CLOSED:
        raise InvalidElement("prefix_representation needs a closed ball")
    r = B.radius
    field = B.field
    if r <= 0:
        return PrefixRep(None, B, MobiusElt((), field))
    if hint is not None:
        cf, n = hint, _split_index(hint, r)
    else:
        cf, n = _prefix_partials(B, r)
    pre = cf.prefix(n)
    g = rho_word(cf, n)
    D = act(g, B.point)
    if not D.radius <= 0:
        raise IdentityCheckFailed(f"tail ball has radius parameter {D.radius} > 0")
    return PrefixRep(pre, Ball(TruncatedSeries(field, D.center, -INF), D.radius, CLOSED), g)
