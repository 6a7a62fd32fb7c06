"""Number handling shared by the analytic modules.

Rationals stay exact end to end; floats take a tolerance of 1e-9 so that
boundary cases (integral exactly 1) are not decided by rounding.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

TOL = 1e-9


def num(x) -> Fraction | float:
    """Coerce input to an exact Fraction where the input is exact.

    Strings such as ``"1/3"`` or ``"0.6"`` and ints become Fractions; floats
    stay floats so callers can opt into the fast path.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return x
    raise TypeError(f"unsupported number {x!r}")


def json_num(x) -> Fraction | float:
    """JSON flavour of :func:`num`: decimal literals are read exactly."""
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            return x
        return Fraction(repr(x))
    return num(x)


def is_exact(*xs) -> bool:
    return all(isinstance(x, Fraction) for x in xs)


def leq(a, b) -> bool:
    if is_exact(a, b):
        return a <= b
    return a <= b + TOL


def geq(a, b) -> bool:
    return leq(b, a)


def eq(a, b) -> bool:
    if is_exact(a, b):
        return a == b
    return abs(a - b) <= TOL


def to_json(x):
    """Fractions serialize as ints when integral, else as ``"p/q"`` strings."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return x.numerator
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float) and x == float("inf"):
        return "inf"
    return x


def from_json(x):
    if x == "inf":
        return float("inf")
    return json_num(x)
