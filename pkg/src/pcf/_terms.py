"""Sparse term lists shared by polynomials and series.

A term list is a tuple of ``(exponent, coefficient)`` pairs with strictly
decreasing :class:`~fractions.Fraction` exponents and nonzero coefficients.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

Terms = tuple


def normalize(pairs: Iterable[tuple]) -> Terms:
    acc: dict = {}
    for e, c in pairs:
        e = Fraction(e)
        if e in acc:
            acc[e] = acc[e] + c
        else:
            acc[e] = c
    return tuple(sorted(((e, c) for e, c in acc.items() if c), key=lambda ec: -ec[0]))


def add(a: Terms, b: Terms) -> Terms:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        ea, eb = a[i][0], b[j][0]
        if ea > eb:
            out.append(a[i])
            i += 1
        elif eb > ea:
            out.append(b[j])
            j += 1
        else:
            c = a[i][1] + b[j][1]
            if c:
                out.append((ea, c))
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def neg(a: Terms) -> Terms:
    return tuple((e, -c) for e, c in a)


def scale(a: Terms, c, shift=0) -> Terms:
    if not c:
        return ()
    return tuple((e + shift, x * c) for e, x in a)


def mul(a: Terms, b: Terms, above=None) -> Terms:
    """Product; with ``above`` set, keep only exponents strictly greater."""
    if not a or not b:
        return ()
    acc: dict = {}
    for ea, ca in a:
        for eb, cb in b:
            e = ea + eb
            if above is not None and e <= above:
                # b is sorted decreasing, the rest is lower still
                break
            if e in acc:
                acc[e] = acc[e] + ca * cb
            else:
                acc[e] = ca * cb
    return tuple(sorted(((e, c) for e, c in acc.items() if c), key=lambda ec: -ec[0]))


def keep_above(a: Terms, cutoff) -> Terms:
    return tuple((e, c) for e, c in a if e > cutoff)


def ramification(a: Terms) -> int:
    n = 1
    for e, _ in a:
        n = math.lcm(n, e.denominator)
    return n


def format_exponent(e: Fraction) -> str:
    if e.denominator == 1:
        return f"t^({e.numerator})"
    return f"t^({e.numerator}/{e.denominator})"


def render(field, terms: Terms) -> str:
    """Canonical text form, e.g. ``t^(3/2) + 2*t^(1/2) - 5``."""
    if not terms:
        return "0"
    parts = []
    for k, (e, c) in enumerate(terms):
        negative = field.is_negative(c)
        mag = -c if negative else c
        if e == 0:
            body = field.render(mag)
        else:
            tp = "t" if e == 1 else format_exponent(e)
            body = tp if mag == 1 else f"{field.render(mag)}*{tp}"
        if k == 0:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f" - {body}" if negative else f" + {body}")
    return "".join(parts)
