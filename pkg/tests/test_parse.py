from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcf.algebra import PuiseuxPoly, RationalPuiseux, reduce_fraction
from pcf.cf import CFExpression, LazyCF
from pcf.errors import ParseError
from pcf.fields import GF, QQ
from pcf.parse import (
    is_stream,
    parse_ball,
    parse_cf,
    parse_expression,
    parse_point,
    parse_typeiv,
    parse_word,
)
from pcf.series import truncate

from . import gen

F = Fraction
t = PuiseuxPoly.gen()


def test_grammar_examples():
    f = parse_expression("t^(3/2) + 2*t^(1/2) - 5")
    assert isinstance(f, PuiseuxPoly) and len(f.terms) == 3
    r = parse_expression("(t+1)/(t)")
    assert isinstance(r, RationalPuiseux) and r == reduce_fraction(t + 1, t)
    s = parse_expression("sqrt:t+1")
    assert is_stream(s)
    assert truncate(s, -1).terms[0] == (F(1, 2), F(1))


def test_negative_exponents_are_exact():
    x = parse_expression("t^(-1) + 1/2*t^(-3/2)")
    assert isinstance(x, RationalPuiseux)
    assert str(x) == "(t^(1/2) + 1/2)/(t^(3/2))"


def test_integer_powers_and_signs():
    assert parse_expression("-t^2 + 3") == -(t * t) + 3
    assert parse_expression("+t") == t
    assert parse_expression("1/2") == PuiseuxPoly.constant(QQ, F(1, 2))


def test_field_coercion():
    assert str(parse_expression("1/2*t", GF(5))) == "3*t"
    with pytest.raises(ParseError):
        parse_expression("1/5*t", GF(5))


def test_cf_literals():
    cf = parse_cf("[t; t, t^(2)]")
    assert isinstance(cf, CFExpression) and cf.partials == (t, t * t)
    lazy = parse_cf("[0; t, (t, t^(2))]")
    assert isinstance(lazy, LazyCF)
    assert [lazy.partial(i) for i in range(1, 6)] == [t, t, t * t, t, t * t]
    # a parenthesised fraction is not a repeating block
    cf = parse_cf("[0; (t^(2))/(1)]")
    assert isinstance(cf, CFExpression) and cf.partials == (t * t,)
    with pytest.raises(ParseError):
        parse_cf("[t; 1]")


def test_stream_prefixes():
    assert is_stream(parse_expression("rat:(1)/(t-1)"))
    assert is_stream(parse_expression("cf:[t; (t)]"))
    assert is_stream(parse_expression("sqrt:sqrt:t^(4)"))


def test_points_balls_words():
    assert str(parse_point("eta(sqrt:t+1, 3/2)")) == "eta(t^(1/2) + 1/2*t^(-1/2), 3/2)"
    assert str(parse_ball("ballo(t, 2)")) == "ballo(t, 2)"
    assert str(parse_word("i*t(-t^(1/2))")) == "i*t(-t^(1/2))"
    assert str(parse_word("m(2, 1, t)")) == "m(2, 1, t)"


def test_typeiv_specs():
    assert str(parse_typeiv("e69")) == "e69"
    assert str(parse_typeiv("e69:2^-i")) == "e69:2^-i"
    assert str(parse_typeiv("iva:2^-i:1")) == "iva:[0; t^(2^-i), ...]"
    with pytest.raises(ParseError):
        parse_typeiv("ivz")
    with pytest.raises(ParseError):
        parse_typeiv("iva:2^-i")


@pytest.mark.parametrize("text, pos", [
    ("t^", 2),
    ("(1)/(0)", 3),
    ("t + ", 4),
    ("t t", 2),
    ("eta(t 1)", 6),
])
def test_error_positions(text, pos):
    with pytest.raises(ParseError) as exc:
        if text.startswith("eta"):
            parse_point(text)
        else:
            parse_expression(text)
    assert exc.value.pos == pos
    assert "^" in str(exc.value)


@settings(max_examples=150)
@given(st.data())
def test_poly_roundtrip(data):
    field = data.draw(gen.fields)
    f = data.draw(gen.puiseux_polys(field))
    assert parse_expression(str(f), field) == f


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_rational_roundtrip(data):
    field = data.draw(gen.fields)
    p = data.draw(gen.puiseux_polys(field))
    q = data.draw(gen.puiseux_polys(field))
    if q.is_zero():
        return
    x = reduce_fraction(p, q)
    y = parse_expression(str(x), field)
    assert (y if isinstance(y, RationalPuiseux) else RationalPuiseux.from_poly(y)) == x


@settings(max_examples=60, deadline=None)
@given(gen.seeds)
def test_cf_and_point_roundtrip(seed):
    rng = random.Random(seed)
    cf = gen.cf(rng, rng.choice(gen.FIELDS), ram_max=3, max_len=4)
    assert parse_cf(str(cf), cf.field) == cf
    p = gen.point(rng)
    assert parse_point(str(p)) == p
