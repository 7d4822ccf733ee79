"""Exact rational parsing and formatting.

Machine-readable rationals are strings ``"p/q"`` or ``"p"``.  Plain decimal
literals such as ``"1.25"`` are accepted because they denote exact rationals;
exponent notation, ``nan`` and ``inf`` are rejected.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import lcm

_RATIONAL_RE = re.compile(r"^[+-]?\d+(?:/\d+|\.\d+)?$")


def parse_rational(value) -> Fraction:
    """Parse an int, Fraction or exact literal string into a Fraction."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not _RATIONAL_RE.match(text):
            raise ValueError(f"not an exact rational literal: {value!r}")
        if "/" in text and int(text.split("/")[1]) == 0:
            raise ValueError(f"zero denominator: {value!r}")
        return Fraction(text)
    raise ValueError(f"not a rational: {value!r} (floats are not accepted)")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def common_denominator(values) -> int:
    out = 1
    for v in values:
        out = lcm(out, Fraction(v).denominator)
    return out
