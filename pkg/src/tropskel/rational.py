"""Exact rational helpers and the ``"p/q"`` text encoding."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from functools import reduce


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def fraction_to_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def ceil_div(a: int, b: int) -> int:
    """Exact ceiling of ``a / b`` for integers, ``b > 0``."""
    return -((-a) // b)


def ceil_fraction(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def vector_gcd(vec) -> int:
    return reduce(gcd, (abs(int(v)) for v in vec), 0)


def lcm_denominators(values) -> int:
    out = 1
    for v in values:
        d = Fraction(v).denominator
        out = out * d // gcd(out, d)
    return out
