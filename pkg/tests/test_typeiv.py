from __future__ import annotations

import random
from fractions import Fraction

import pytest

from pcf.algebra import PuiseuxPoly
from pcf.berkovich import ACCUMULATES, CLOSED, Ball
from pcf.errors import BadCertificate, InvalidElement, NestingViolation
from pcf.fields import QQ
from pcf.parse import parse_expression, parse_typeiv
from pcf.typeiv import (
    GrowingPrefix,
    NestedBallSeq,
    e69_sequence,
    exclude_point,
    from_convergent_cf,
    ivb_witness,
    monomial_cf,
    parse_schedule,
    promenade_of_sequence,
)

from . import gen

F = Fraction


def P(text):
    return parse_expression(text)


def e69_center(n, r=lambda i: F(1, i)):
    return sum((PuiseuxPoly.monomial(QQ, r(i)) for i in range(1, n + 1)), PuiseuxPoly.zero())


# -- from_convergent_cf ---------------------------------------------------------------------------

def test_iva_radii():
    seq = from_convergent_cf(monomial_cf(lambda i: F(1, 2 ** i)), 1)
    radii = [b.radius for b in seq.balls(10)]
    assert radii == [2 * (1 - F(1, 2 ** n)) for n in range(1, 11)]
    assert seq.certificate.radius_limit == 2


def test_iva_three():
    seq = from_convergent_cf(monomial_cf(lambda i: F(1, 3 ** i)), F(1, 2))
    radii = [b.radius for b in seq.balls(6)]
    assert radii == [2 * sum(F(1, 3 ** i) for i in range(1, n + 1)) for n in range(1, 7)]
    assert all(r < 1 for r in radii) and 1 - radii[-1] < F(1, 500)


def test_iva_rejects_divergent():
    with pytest.raises(BadCertificate):
        from_convergent_cf(monomial_cf(lambda i: F(1, 2)), 10)
    # a bound beyond the checked prefix is caught while producing balls
    seq = from_convergent_cf(monomial_cf(lambda i: F(1, 2)), 40)
    with pytest.raises(BadCertificate):
        seq.balls(100)


def test_iva_witness_grows():
    seq = parse_typeiv("iva:2^-i:1")
    with pytest.raises(GrowingPrefix) as exc:
        ivb_witness(seq, 8)
    assert exc.value.verdict == "IVa"


# -- e69 ------------------------------------------------------------------------------------------

def test_e69_default():
    seq = e69_sequence(N=4)
    balls = seq.balls(10)
    assert len(balls) == 4
    assert [b.center_value().as_poly() for b in balls] == [e69_center(n) for n in range(1, 5)]
    assert [b.radius for b in balls] == [F(-1, 2), F(-1, 3), F(-1, 4), F(-1, 5)]
    assert all(b.kind == CLOSED for b in balls)


def test_e69_power_schedule():
    r = parse_schedule("2^-i")
    seq = e69_sequence(r)
    balls = seq.balls(5)
    assert [b.radius for b in balls] == [-F(1, 2 ** (n + 1)) for n in range(1, 6)]
    assert balls[2].center_value().as_poly() == e69_center(3, r)


def test_e69_single_ball():
    seq = e69_sequence(N=1)
    assert len(seq.balls(5)) == 1
    w = ivb_witness(seq, 5)
    assert w.prefix is None


def test_e69_witness():
    w = ivb_witness(e69_sequence(), 10)
    assert w.verdict == "IVb" and w.prefix is None
    assert all(d.radius < 0 for d in w.D)


def test_schedule_validation():
    with pytest.raises(InvalidElement):
        e69_sequence(parse_schedule("1"))
    with pytest.raises(ValueError):
        parse_schedule("i^2")


# -- exclusion ----------------------------------------------------------------------------------

def test_exclude_examples():
    seq = e69_sequence()
    assert str(exclude_point(seq, P("t + t^(1/2)"), 10)) == "excluded-at(3)"
    # b_3 itself leaves at B_4
    assert exclude_point(seq, e69_center(3), 10).index == 4
    assert exclude_point(seq, P("t^(2)"), 10).index == 1
    assert str(exclude_point(seq, e69_center(3), 3)) == "inconclusive"


def test_exclude_oracle():
    # first n with nu(z - b_n) < r(n+1), computed directly
    seq = e69_sequence()
    rng = random.Random(5)
    for _ in range(20):
        z = gen.poly(rng, QQ, rng.randint(1, 6), max_deg=1)
        want = None
        for n in range(1, 9):
            d = z - e69_center(n)
            v = d.valuation
            if v < -F(1, n + 1):
                want = n
                break
        got = exclude_point(seq, z, 8)
        assert got.index == want


# -- nesting and promenades ---------------------------------------------------------------------

def test_raw_sequence_nesting():
    good = NestedBallSeq.raw([Ball(P("t"), -1), Ball(P("t + 1"), 0)])
    assert len(good.balls(2)) == 2
    bad = NestedBallSeq.raw([Ball(P("t"), 0), Ball(P("t + 1"), -1)])
    with pytest.raises(NestingViolation):
        bad.balls(2)
    w = ivb_witness(NestedBallSeq.raw([Ball(P("t"), 1, CLOSED)]), 3)
    assert w.verdict == "inconclusive" and str(w.prefix) == "[t]"


def test_typeiv_promenades():
    pm = promenade_of_sequence(parse_typeiv("iva:2^-i:1"), 6)
    assert pm.tail == ACCUMULATES
    assert [v for _, v in pm.maxima] == [F(1, 2 ** i) for i in range(1, 7)]
    pm = promenade_of_sequence(e69_sequence())
    assert pm.tail == ACCUMULATES and pm.domain_end == 0
