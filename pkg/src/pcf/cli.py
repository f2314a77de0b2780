"""``pcf`` command-line front end.

Exit status: 0 on success, 1 on domain or syntax errors, 2 when the answer
is undecided at the given precision or term budget.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from fractions import Fraction

from . import _terms, berkovich as bk
from .algebra import INF, PuiseuxPoly, RationalPuiseux
from .cf import (
    BUDGET,
    PRECISION,
    CFExpression,
    LazyCF,
    approximants,
    best_approximation_check,
    cf_value_stream,
    detect_periodicity,
    error_valuation,
    evaluate_exact,
    expand_exact,
    expand_stream,
)
from .errors import PcfError, IdentityCheckFailed, Undecided
from .fields import field_from_name
from .parse import parse_ball, parse_expression, parse_point, parse_poly, parse_typeiv, parse_word
from .series import SeriesStream, truncate
from .typeiv import GrowingPrefix, exclude_point, ivb_witness, promenade_of_sequence

_VALUE_OPTS = ("--field", "--cutoff", "--max-terms", "--format", "--svg", "--t-max", "--n",
               "--max-period", "--margin", "--threshold", "--exclude", "--budget")


def _num(x) -> str:
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    return str(x)


def _rational_arg(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational a/b, got {text!r}") from None


def _field_arg(text: str):
    try:
        return field_from_name(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _count(text: str, least: int) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < least:
        raise argparse.ArgumentTypeError(f"must be >= {least}")
    return n


def _positive_int(text: str) -> int:
    return _count(text, 0)


def _term_count(text: str) -> int:
    return _count(text, 1)


class Output:
    def __init__(self, args, out):
        self.args = args
        self.out = out

    def emit(self, text: str, data=None, tsv: str | None = None):
        fmt = self.args.format
        if fmt == "json":
            self.out.write(json.dumps(data if data is not None else {"result": text}, indent=2) + "\n")
        elif fmt == "tsv" and tsv is not None:
            self.out.write(tsv if tsv.endswith("\n") else tsv + "\n")
        else:
            self.out.write(text + "\n")


# -- helpers -----------------------------------------------------------------------------

def _value(args, text):
    return parse_expression(text, args.field)


def _partials(args) -> int:
    # --max-terms counts displayed terms, f0 included
    return args.max_terms - 1


def _expansion(args, v) -> CFExpression:
    n = _partials(args)
    if isinstance(v, CFExpression):
        cf = v
        if len(cf.partials) > n:
            cf = CFExpression(cf.f0, cf.partials[:n], False, BUDGET)
        return cf
    if isinstance(v, LazyCF):
        return v.prefix(n)
    return expand_stream(v, n, args.cutoff).cf


def _target(v):
    """Value usable as ``z`` in numeric checks."""
    if isinstance(v, (CFExpression, LazyCF)):
        if isinstance(v, CFExpression) and v.finite:
            return evaluate_exact(v)
        return cf_value_stream(v)
    return v


def _status_code(status: str) -> int:
    return 2 if status in (BUDGET, PRECISION) else 0


# -- commands ------------------------------------------------------------------------------

def cmd_expand(args, o: Output) -> int:
    cf = _expansion(args, _value(args, args.z))
    o.emit(cf.render(), cf.to_json())
    return _status_code(cf.status)


def cmd_eval(args, o: Output) -> int:
    v = _value(args, args.cf)
    if isinstance(v, CFExpression):
        val = evaluate_exact(v)
    elif isinstance(v, LazyCF):
        val = truncate(cf_value_stream(v), args.cutoff)
    elif isinstance(v, SeriesStream):
        val = truncate(v, args.cutoff)
    else:
        val = v
    o.emit(str(val), {"value": str(val)})
    return 0


def cmd_approx(args, o: Output) -> int:
    cf = _expansion(args, _value(args, args.z))
    n = len(cf.partials) if args.n is None else args.n
    pairs = approximants(cf, n)
    lines, rows, tsv = [], [], ["n\tp\tq\tdeg_q"]
    for ap in pairs:
        lines.append(f"x{ap.index} = ({ap.p})/({ap.q})")
        rows.append({"n": ap.index, "p": str(ap.p), "q": str(ap.q), "deg_q": _num(ap.q.degree),
                     "value": str(ap.value)})
        tsv.append(f"{ap.index}\t{ap.p}\t{ap.q}\t{_num(ap.q.degree)}")
    o.emit("\n".join(lines), {"approximants": rows, "status": cf.status}, "\n".join(tsv))
    return 0


def cmd_error(args, o: Output) -> int:
    z = _target(_value(args, args.z))
    v = error_valuation(z, args.index, args.cutoff)
    o.emit(_num(v), {"n": args.index, "valuation": _num(v)})
    return 0


def cmd_best(args, o: Output) -> int:
    z = _target(_value(args, args.z))
    p, q = parse_poly(args.p, args.field), parse_poly(args.q, args.field)
    res = best_approximation_check(z, p, q, args.cutoff, args.max_terms)
    data = {"result": res.kind, "index": res.index}
    o.emit(str(res), data)
    return 0


def cmd_period(args, o: Output) -> int:
    v = _value(args, args.z)
    cf = _expansion(args, v)
    z = None if isinstance(v, CFExpression) and v.finite else _target(v)
    res = detect_periodicity(cf, args.max_period, z, args.cutoff, args.margin, args.threshold)
    if res is None:
        o.emit("none", {"period": None})
        return 0
    text = (f"preperiod {res.preperiod}, period {res.period}, {res.verdict}\n"
            f"quadratic: {res.quadratic()}\n"
            f"residual valuation >= {_num(res.residual)} (threshold {res.threshold})")
    o.emit(text, res.to_json())
    return 0


def _point_json(p: bk.BerkPoint) -> dict:
    return {"center": str(p.center_series), "radius": str(p.radius)}


def cmd_dist(args, o: Output) -> int:
    p, q = parse_point(args.p, args.field), parse_point(args.q, args.field)
    d = bk.distance(p, q)
    o.emit(str(d), {"distance": str(d)})
    return 0


def cmd_join(args, o: Output) -> int:
    p, q = parse_point(args.p, args.field), parse_point(args.q, args.field)
    j = bk.join(p, q)
    o.emit(str(j), _point_json(j))
    return 0


def cmd_act(args, o: Output) -> int:
    g = parse_word(args.word, args.field)
    p = parse_point(args.point, args.field)
    img = bk.act(g, p)
    o.emit(str(img), _point_json(img))
    return 0


def cmd_reduce(args, o: Output) -> int:
    p = parse_point(args.point, args.field)
    red = bk.reduce_to_ray(p)
    img = bk.act(red.witness, p)
    o.emit(f"v = {red.v}\nwitness: {red.witness}\nimage: {img}",
           {"v": str(red.v), "witness": str(red.witness), "image": str(img)})
    return 0


def cmd_promenade(args, o: Output) -> int:
    spec = args.u.strip()
    if spec == "e69" or spec.startswith(("e69:", "iva:")):
        pm = promenade_of_sequence(parse_typeiv(spec, args.field), _partials(args))
    else:
        v = _value(args, spec)
        if isinstance(v, CFExpression):
            u = v
        elif isinstance(v, LazyCF):
            u = v.prefix(_partials(args))
        else:
            u = v
        pm = bk.promenade(u, args.t_max, _partials(args), args.cutoff)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(pm.to_svg())
    o.emit(str(pm), pm.to_json(), pm.to_tsv())
    return 2 if pm.tail == bk.TRUNCATED else 0


def cmd_ball(args, o: Output) -> int:
    v = _value(args, args.cf)
    if not isinstance(v, CFExpression):
        v = expand_exact(v) if isinstance(v, (PuiseuxPoly, RationalPuiseux)) else _expansion(args, v)
    b = bk.ball_of_prefix(v)
    o.emit(str(b), {"center": _terms.render(b.field, b.point.center), "radius": str(b.radius), "kind": b.kind})
    return 0


def cmd_prefix_rep(args, o: Output) -> int:
    b = parse_ball(args.ball, args.field)
    rep = bk.prefix_representation(b)
    data = {
        "prefix": None if rep.cf is None else rep.cf.to_json(),
        "D": str(rep.D),
        "D_radius": str(rep.D.radius),
        "word": str(rep.word),
    }
    o.emit(str(rep), data)
    return 0


def cmd_typeiv(args, o: Output) -> int:
    seq = parse_typeiv(args.spec, args.field)
    N = args.n
    lines, rows = [f"{seq} [{seq.certificate}]"], []
    balls = seq.balls(N)
    for k, b in enumerate(balls, 1):
        nest = "root" if k == 1 else "nested"
        center = _terms.render(b.field, b.center)
        lines.append(f"{k}\t{center}\t{b.radius}\t{nest}")
        rows.append({"n": k, "center": center, "radius": str(b.radius), "nesting": nest})
    exclusions = []
    for text in args.exclude or ():
        z = _target(_value(args, text))
        res = exclude_point(seq, z, N)
        exclusions.append({"point": text, "result": str(res)})
        lines.append(f"exclude {text}: {res}")
    try:
        w = ivb_witness(seq, args.budget or N)
        witness = {"prefix": None if w.prefix is None else str(w.prefix), "verdict": w.verdict,
                   "stable_from": w.stable_from}
        lines.append(f"witness: {w}")
    except GrowingPrefix as exc:
        witness = {"prefix": None, "verdict": exc.verdict, "detail": str(exc)}
        lines.append(f"witness: prefixes keep growing ({exc.verdict})")
    o.emit("\n".join(lines), {"label": str(seq), "certificate": str(seq.certificate), "balls": rows,
                              "exclusions": exclusions, "witness": witness})
    return 0


# -- parser ------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", type=_field_arg, default=field_from_name("q"), help="q or fp:<p>")
    common.add_argument("--cutoff", type=_rational_arg, default=Fraction(-50), help="truncation exponent a/b")
    common.add_argument("--max-terms", type=_term_count, default=32, help="term budget, f0 included")
    common.add_argument("--format", choices=("text", "json", "tsv"), default="text")

    p = argparse.ArgumentParser(prog="pcf", description="Continued fractions over the Puiseux field.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("expand", cmd_expand, "continued fraction expansion")
    sp.add_argument("z")
    sp = add("eval", cmd_eval, "evaluate a CF literal")
    sp.add_argument("cf")
    sp = add("approx", cmd_approx, "approximants p_n/q_n")
    sp.add_argument("z")
    sp.add_argument("--n", type=_positive_int)
    sp = add("error", cmd_error, "valuation of z - p_n/q_n")
    sp.add_argument("z")
    sp.add_argument("index", type=_positive_int)
    sp = add("best", cmd_best, "best approximation check for p/q")
    sp.add_argument("z")
    sp.add_argument("p")
    sp.add_argument("q")
    sp = add("period", cmd_period, "detect an eventual period")
    sp.add_argument("z")
    sp.add_argument("--max-period", type=_positive_int, default=6)
    sp.add_argument("--margin", type=_rational_arg, default=Fraction(10))
    sp.add_argument("--threshold", type=_rational_arg, default=None)
    sp = add("berk-dist", cmd_dist, "distance of two points")
    sp.add_argument("p")
    sp.add_argument("q")
    sp = add("berk-join", cmd_join, "join of two points")
    sp.add_argument("p")
    sp.add_argument("q")
    sp = add("berk-act", cmd_act, "act on a point by a word")
    sp.add_argument("word")
    sp.add_argument("point")
    sp = add("reduce", cmd_reduce, "reduce a point to the modular ray")
    sp.add_argument("point")
    sp = add("promenade", cmd_promenade, "promenade breakpoints")
    sp.add_argument("u")
    sp.add_argument("--t-max", type=_rational_arg, default=None)
    sp.add_argument("--svg", default=None)
    sp = add("ball", cmd_ball, "ball of a CF prefix")
    sp.add_argument("cf")
    sp = add("prefix-rep", cmd_prefix_rep, "split a closed ball into prefix and tail")
    sp.add_argument("ball")
    sp = add("typeiv", cmd_typeiv, "nested ball sequences")
    sp.add_argument("spec")
    sp.add_argument("--n", type=_positive_int, default=6)
    sp.add_argument("--exclude", action="append")
    sp.add_argument("--budget", type=_positive_int, default=None, help="balls inspected for the witness (default: --n)")
    return p


def _glue(argv: list) -> list:
    # let option values start with '-' (e.g. --cutoff -40)
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err):
            args = parser.parse_args(_glue(argv))
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.func(args, Output(args, out))
    except Undecided as exc:
        err.write(f"undecided: {exc}\n")
        return 2
    except IdentityCheckFailed as exc:
        err.write(f"internal check failed: {exc}\n")
        return 1
    except (PcfError, ValueError, ZeroDivisionError, IndexError) as exc:
        err.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
