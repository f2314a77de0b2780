"""Text syntax for values, streams, expressions, points, balls and words.

::

    expr    := ['-'] term (('+' | '-') term)*
    term    := coeff ['*' tpow] | tpow | '(' expr ')' ['/' '(' expr ')']
    coeff   := int ['/' int]
    tpow    := 't' ['^' ('(' ['-'] int ['/' int] ')' | int)]
    cf      := '[' expr [';' item (',' item)*] ']'      item := expr | '(' expr (',' expr)* ')'
    value   := 'rat:' expr | 'sqrt:' value | 'cf:' cf | expr
    point   := 'eta(' value ',' rational ')'
    ball    := ('ballo' | 'ballc') '(' value ',' rational ')'
    word    := gen ('*' gen)*          gen := 'i' | 't(' expr ')' | 'm(' expr ',' expr ',' expr ')'

Negative exponents are allowed in expressions; such finite sums are exact
elements of k~.  A parenthesized group in a CF literal is a repeating block.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .algebra import PuiseuxPoly, RationalPuiseux, coerce_rational
from .berkovich import Ball, BerkPoint, CLOSED, Gen, I, MobiusElt, OPEN, gen_m
from .cf import CFExpression, LazyCF, cf_value_stream, periodic_cf
from .errors import ParseError
from .fields import Field, QQ
from .series import SeriesStream, TruncatedSeries, from_rational, sqrt_stream
from .typeiv import DEFAULT_E69, NestedBallSeq, e69_sequence, from_convergent_cf, monomial_cf, parse_schedule

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if not m:
                break
            start = m.start(m.lastindex)
            if m.group(1):
                self.toks.append(("num", m.group(1), start))
            elif m.group(2):
                self.toks.append(("id", m.group(2), start))
            else:
                self.toks.append(("op", m.group(3), start))
            pos = m.end()
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else ("end", "", len(self.text))

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def expect(self, value: str):
        tok = self.next()
        if tok[1] != value:
            self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def at(self, value: str) -> bool:
        return self.peek()[1] == value

    def done(self) -> bool:
        return self.i >= len(self.toks)


class Parser:
    def __init__(self, text: str, field: Field = QQ):
        self.lx = _Lexer(text)
        self.field = field

    # -- numbers ---------------------------------------------------------------------
    def _int(self) -> int:
        tok = self.lx.next()
        if tok[0] != "num":
            self.lx.error("expected an integer", tok)
        return int(tok[1])

    def rational(self) -> Fraction:
        neg = False
        if self.lx.at("-"):
            self.lx.next()
            neg = True
        n = Fraction(self._int())
        if self.lx.at("/") and self.lx.peek(1)[0] == "num":
            self.lx.next()
            d = self._int()
            if d == 0:
                self.lx.error("zero denominator")
            n = n / d
        return -n if neg else n

    # -- expressions --------------------------------------------------------------------
    def _tpow(self) -> Fraction:
        self.lx.expect("t")
        if not self.lx.at("^"):
            return Fraction(1)
        self.lx.next()
        if self.lx.at("("):
            self.lx.next()
            e = self.rational()
            self.lx.expect(")")
            return e
        return Fraction(self._int())

    def _coeff(self, c: Fraction):
        try:
            return self.field(c)
        except ZeroDivisionError:
            self.lx.error(f"{c} has no image in {self.field.name}")

    def _term(self):
        """A single term; returns either a term list or a RationalPuiseux."""
        tok = self.lx.peek()
        if tok[1] == "(":
            self.lx.next()
            num = self.expr()
            self.lx.expect(")")
            if self.lx.at("/"):
                slash = self.lx.next()
                self.lx.expect("(")
                den = self.expr()
                self.lx.expect(")")
                den = coerce_rational(den, self.field)
                if den.is_zero():
                    self.lx.error("zero denominator", slash)
                return coerce_rational(num, self.field) / den
            return coerce_rational(num, self.field)
        if tok[1] == "t":
            return [(self._tpow(), self.field.one)]
        if tok[0] == "num":
            c = Fraction(self._int())
            if self.lx.at("/") and self.lx.peek(1)[0] == "num":
                self.lx.next()
                d = self._int()
                if d == 0:
                    self.lx.error("zero denominator")
                c = c / d
            if self.lx.at("*"):
                self.lx.next()
                return [(self._tpow(), self._coeff(c))]
            return [(Fraction(0), self._coeff(c))]
        self.lx.error(f"unexpected {tok[1] or 'end of input'!r}")

    def expr(self):
        """Sum of terms, as a PuiseuxPoly or RationalPuiseux."""
        sign = 1
        if self.lx.at("-"):
            self.lx.next()
            sign = -1
        elif self.lx.at("+"):
            self.lx.next()
        terms: list = []
        frac = None
        while True:
            t = self._term()
            if isinstance(t, RationalPuiseux):
                t = t if sign > 0 else -t
                frac = t if frac is None else frac + t
            else:
                terms += [(e, c if sign > 0 else -c) for e, c in t]
            if self.lx.at("+"):
                self.lx.next()
                sign = 1
            elif self.lx.at("-"):
                self.lx.next()
                sign = -1
            else:
                break
        val = TruncatedSeries.exact(self.field, terms).to_rational()
        if frac is not None:
            val = val + frac
        return val.num if val.is_polynomial() else val

    def poly(self) -> PuiseuxPoly:
        tok = self.lx.peek()
        v = self.expr()
        if isinstance(v, RationalPuiseux):
            self.lx.error("expected a Puiseux polynomial", tok)
        return v

    # -- continued fractions ---------------------------------------------------------------
    def cf_literal(self):
        self.lx.expect("[")
        f0 = self.poly()
        pre, period = [], []
        if self.lx.at(";"):
            self.lx.next()
            while True:
                if self.lx.at("(") and self._is_block():
                    self.lx.next()
                    period.append(self.poly())
                    while self.lx.at(","):
                        self.lx.next()
                        period.append(self.poly())
                    self.lx.expect(")")
                    break
                tok = self.lx.peek()
                f = self.poly()
                if not f.degree > 0:
                    self.lx.error(f"partial {f} must have positive degree", tok)
                pre.append(f)
                if not self.lx.at(","):
                    break
                self.lx.next()
        self.lx.expect("]")
        if period:
            for f in period:
                if not f.degree > 0:
                    self.lx.error(f"partial {f} must have positive degree")
            return periodic_cf(f0, pre, period)
        return CFExpression(f0, pre, True)

    def _is_block(self) -> bool:
        # '(' starts a repeating block unless it is a '(...)/(...)' fraction
        depth, j = 0, self.lx.i
        while j < len(self.lx.toks):
            v = self.lx.toks[j][1]
            if v == "(":
                depth += 1
            elif v == ")":
                depth -= 1
                if depth == 0:
                    nxt = self.lx.toks[j + 1][1] if j + 1 < len(self.lx.toks) else ""
                    return nxt != "/"
            elif v == "," and depth == 1:
                return True
            j += 1
        return True

    # -- values and streams ----------------------------------------------------------------
    def value(self):
        tok = self.lx.peek()
        if tok[0] == "id" and self.lx.peek(1)[1] == ":":
            kind = tok[1]
            if kind == "rat":
                self.lx.next(), self.lx.next()
                v = self.expr()
                return from_rational(v)
            if kind == "sqrt":
                self.lx.next(), self.lx.next()
                v = self.value()
                return sqrt_stream(v)
            if kind == "cf":
                self.lx.next(), self.lx.next()
                return cf_value_stream(self.cf_literal())
        if tok[1] == "[":
            return self.cf_literal()
        return self.expr()

    # -- geometry ------------------------------------------------------------------------------
    def point(self) -> BerkPoint:
        self.lx.expect("eta")
        self.lx.expect("(")
        v = self._as_center(self.value())
        self.lx.expect(",")
        r = self.rational()
        self.lx.expect(")")
        return BerkPoint(v, r, self.field)

    def ball(self) -> Ball:
        tok = self.lx.next()
        kinds = {"ballo": OPEN, "ballc": CLOSED}
        if tok[1] not in kinds:
            self.lx.error("expected ballo(...) or ballc(...)", tok)
        self.lx.expect("(")
        v = self._as_center(self.value())
        self.lx.expect(",")
        r = self.rational()
        self.lx.expect(")")
        return Ball(v, r, kinds[tok[1]], self.field)

    def _as_center(self, v):
        if isinstance(v, (CFExpression, LazyCF)):
            return cf_value_stream(v)
        return v

    def gen(self) -> Gen:
        tok = self.lx.next()
        if tok[1] == "i":
            return I
        if tok[1] == "t":
            self.lx.expect("(")
            f = self.expr()
            self.lx.expect(")")
            return gen_m(1, 1, f, self.field)
        if tok[1] == "m":
            self.lx.expect("(")
            d1 = self.expr()
            self.lx.expect(",")
            d2 = self.expr()
            self.lx.expect(",")
            f = self.expr()
            self.lx.expect(")")
            try:
                return gen_m(d1, d2, f, self.field)
            except Exception as exc:
                self.lx.error(str(exc), tok)
        self.lx.error("expected i, t(...) or m(...)", tok)

    def word(self) -> MobiusElt:
        gens = [self.gen()]
        while self.lx.at("*"):
            self.lx.next()
            gens.append(self.gen())
        return MobiusElt.from_product(gens, self.field)

    def finish(self):
        if not self.lx.done():
            self.lx.error(f"unexpected {self.lx.peek()[1]!r}")


def _run(text: str, field: Field, method: str):
    p = Parser(text, field)
    out = getattr(p, method)()
    p.finish()
    return out


def parse_expression(text: str, field: Field = QQ):
    """An exact value, a CF literal, or a stream built from a spec."""
    return _run(text, field, "value")


def parse_poly(text: str, field: Field = QQ) -> PuiseuxPoly:
    return _run(text, field, "poly")


def parse_cf(text: str, field: Field = QQ):
    return _run(text, field, "cf_literal")


def parse_point(text: str, field: Field = QQ) -> BerkPoint:
    return _run(text, field, "point")


def parse_ball(text: str, field: Field = QQ) -> Ball:
    return _run(text, field, "ball")


def parse_word(text: str, field: Field = QQ) -> MobiusElt:
    return _run(text, field, "word")


def parse_typeiv(text: str, field: Field = QQ) -> NestedBallSeq:
    """``e69``, ``e69:<schedule>`` or ``iva:<degree schedule>:<bound>``."""
    s = text.strip()
    try:
        if s == "e69" or s.startswith("e69:"):
            sched = s[4:] if s.startswith("e69:") else DEFAULT_E69
            return e69_sequence(parse_schedule(sched), field=field)
        if s.startswith("iva:"):
            body = s[4:]
            sched, sep, bound = body.rpartition(":")
            if not sep:
                raise ValueError("iva spec needs iva:<degree schedule>:<bound>")
            D = parse_schedule(sched)
            cf = monomial_cf(D, field, f"[0; t^({D}), ...]")
            return from_convergent_cf(cf, Fraction(bound))
    except ValueError as exc:
        raise ParseError(str(exc), text, 0) from None
    raise ParseError("expected e69, e69:<schedule> or iva:<schedule>:<bound>", text, 0)


def is_stream(v) -> bool:
    return isinstance(v, SeriesStream)
