"""Number handling shared by every module.

Three kinds of values flow through the library:

* exact rationals (``fractions.Fraction`` or ``int``) -- the default;
* Python floats ("decimal mode"), compared with an absolute tolerance;
* other exact number objects (e.g. sympy algebraic numbers), compared exactly.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

DECIMAL_TOL = 1e-9

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


def parse_number(text: str) -> Fraction:
    """Parse ``a/b``, an integer, or a decimal literal into an exact Fraction."""
    text = text.strip()
    if _RATIONAL_RE.match(text) or _DECIMAL_RE.match(text):
        return Fraction(text)
    raise ValueError(f"not a number: {text!r}")


def is_decimal_literal(text: str) -> bool:
    text = text.strip()
    return not _RATIONAL_RE.match(text) and bool(_DECIMAL_RE.match(text))


def is_rational(x) -> bool:
    return isinstance(x, Rational)


def is_float(x) -> bool:
    return isinstance(x, float)


def tolerance_for(values) -> float:
    """Zero for exact data, ``DECIMAL_TOL`` as soon as one float is present."""
    return DECIMAL_TOL if any(isinstance(v, float) for v in values) else 0.0


def simplify(x):
    # sympy expressions need explicit expansion so equal values compare equal
    expand = getattr(x, "expand", None)
    if expand is not None and not isinstance(x, (int, float, Fraction)):
        return expand()
    return x


def is_zero(x, tol: float = 0.0) -> bool:
    if isinstance(x, float) or tol:
        return abs(float(x)) <= tol
    return bool(simplify(x) == 0)


def leq(a, b, tol: float = 0.0) -> bool:
    """``a <= b`` exactly, or up to ``tol`` when either side is a float."""
    if tol or isinstance(a, float) or isinstance(b, float):
        return float(a) <= float(b) + tol
    return bool(simplify(a - b) <= 0)


def to_float(x) -> float:
    return float(x)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    num = getattr(x, "numerator", None)
    den = getattr(x, "denominator", None)
    if num is not None and den is not None:
        if callable(num):  # sympy Rational
            num, den = num(), den()
        return Fraction(int(num), int(den))
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def fmt(x) -> str:
    """Render a value as ``5/2 (2.5)`` when exact, plain decimal otherwise."""
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x} ({float(x):.10g})"
    return f"{x} ({float(x):.10g})"


def exact_str(x) -> str | None:
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    if isinstance(x, float):
        return None
    return str(x)


def lcm_of_denominators(values) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, as_fraction(v).denominator)
    return d
