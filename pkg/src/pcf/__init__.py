"""Continued fractions over the Puiseux field, Berkovich line geometry and type IV points."""

from __future__ import annotations

from .algebra import INF, PuiseuxPoly, RationalPuiseux, degree, poly_gcd, reduce_fraction, valuation
from .berkovich import (
    Ball,
    BerkPoint,
    MobiusElt,
    act,
    ball_of_prefix,
    distance,
    join,
    lies_above,
    prefix_representation,
    promenade,
    reduce_to_ray,
)
from .cf import (
    CFExpression,
    LazyCF,
    approximants,
    best_approximation_check,
    cf_value_stream,
    classify_convergence,
    detect_periodicity,
    error_valuation,
    evaluate_exact,
    expand_exact,
    expand_stream,
    periodic_cf,
    prefix_agreement_bound,
)
from .errors import (
    BudgetExhausted,
    ParseError,
    PcfError,
    PrecisionExhausted,
    IdentityCheckFailed,
    Undecided,
)
from .fields import GF, QQ, field_from_name
from .parse import parse_ball, parse_cf, parse_expression, parse_point, parse_poly, parse_word
from .series import SeriesStream, TruncatedSeries, from_rational, sqrt_stream, truncate
from .typeiv import e69_sequence, exclude_point, from_convergent_cf, ivb_witness

__version__ = "0.1.0"

__all__ = [
    "INF", "PuiseuxPoly", "RationalPuiseux", "degree", "poly_gcd", "reduce_fraction", "valuation",
    "Ball", "BerkPoint", "MobiusElt", "act", "ball_of_prefix", "distance", "join", "lies_above",
    "prefix_representation", "promenade", "reduce_to_ray",
    "CFExpression", "LazyCF", "approximants", "best_approximation_check", "cf_value_stream",
    "classify_convergence", "detect_periodicity", "error_valuation", "evaluate_exact", "expand_exact",
    "expand_stream", "periodic_cf", "prefix_agreement_bound",
    "BudgetExhausted", "ParseError", "PcfError", "PrecisionExhausted", "IdentityCheckFailed", "Undecided",
    "GF", "QQ", "field_from_name",
    "parse_ball", "parse_cf", "parse_expression", "parse_point", "parse_poly", "parse_word",
    "SeriesStream", "TruncatedSeries", "from_rational", "sqrt_stream", "truncate",
    "e69_sequence", "exclude_point", "from_convergent_cf", "ivb_witness",
]
