"""Scalar handling shared by every module.

Two arithmetic modes exist: exact (``fractions.Fraction``, with plain ``int``
accepted as exact) and float.  A value set is in exact mode when every entry
is an ``int`` or ``Fraction``; mixing ``Fraction`` with ``float`` is rejected.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

Scalar = Union[Fraction, float]

DEFAULT_TOL = 1e-9


class ModeError(TypeError):
    """Exact and float scalars were mixed in one structure."""


def _is_exact_value(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def infer_exact(values: Iterable) -> bool:
    """Return True if all values are rationals, False if all floats/ints.

    ``int`` is neutral.  A mix of ``Fraction`` and ``float`` raises ModeError.
    """
    saw_fraction = saw_float = False
    for v in values:
        if isinstance(v, bool):
            raise TypeError("booleans are not scalars")
        if isinstance(v, Fraction):
            saw_fraction = True
        elif isinstance(v, float):
            saw_float = True
        elif not isinstance(v, (int, Rational)):
            raise TypeError(f"unsupported scalar {v!r} of type {type(v).__name__}")
    if saw_fraction and saw_float:
        raise ModeError("exact rationals and floats mixed in one value set")
    return not saw_float


def to_scalar(v, exact: bool) -> Scalar:
    """Convert ``v`` (number or decimal/fraction string) to the given mode."""
    if isinstance(v, bool):
        raise TypeError("booleans are not scalars")
    if exact:
        if isinstance(v, float):
            raise ModeError(f"float {v!r} given in exact mode; pass a string or Fraction")
        if isinstance(v, str):
            return Fraction(v.strip())
        return Fraction(v)
    if isinstance(v, str):
        return float(Fraction(v.strip()))
    return float(v)


def parse_json_number(text: str) -> Fraction:
    """``json`` hook turning a numeric literal into an exact Fraction."""
    return Fraction(text)


def fmt_scalar(v) -> Union[str, float, int, None]:
    """Canonical JSON form: exact values as ``"p/q"`` strings, floats as-is."""
    if v is None:
        return None
    if isinstance(v, Fraction) or (isinstance(v, int) and not isinstance(v, bool)):
        f = Fraction(v)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    return float(v)


def is_zero(v, tol: float, exact: bool) -> bool:
    return v == 0 if exact else abs(v) <= tol


def sqrt_exact(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None if irrational."""
    if q < 0:
        raise ValueError("square root of negative value")
    from math import isqrt

    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None
