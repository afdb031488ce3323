"""Exact extended rationals: ``fractions.Fraction`` plus a positive infinity.

Finite values are plain :class:`~fractions.Fraction` objects (always reduced,
positive denominator).  The single infinite value is :data:`INF`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

from .errors import ParseError


class _Infinity:
    """Positive infinity for cost values.  There is exactly one instance."""

    _instance = None
    __slots__ = ()

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    __str__ = __repr__

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("vcsp-inf")

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        if other is self or _is_finite_number(other):
            return False
        return NotImplemented

    def __le__(self, other):
        if other is self:
            return True
        if _is_finite_number(other):
            return False
        return NotImplemented

    def __gt__(self, other):
        if other is self:
            return False
        if _is_finite_number(other):
            return True
        return NotImplemented

    def __ge__(self, other):
        if other is self or _is_finite_number(other):
            return True
        return NotImplemented

    def __add__(self, other):
        if other is self or _is_finite_number(other):
            return self
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if _is_finite_number(other):
            return self
        raise ArithmeticError("INF - INF is undefined")

    def __rsub__(self, other):
        raise ArithmeticError("finite - INF is not representable")

    def __mul__(self, other):
        # y * inf = inf for y >= 0 (including y = 0)
        if _is_finite_number(other):
            if other < 0:
                raise ArithmeticError("negative multiple of INF")
            return self
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        raise ArithmeticError("-INF is not an extended rational")


INF = _Infinity()

ExtendedRational = Union[Fraction, _Infinity]


def _is_finite_number(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def is_inf(x) -> bool:
    return x is INF


def is_finite(x) -> bool:
    return x is not INF


def ext(value) -> ExtendedRational:
    """Coerce ints, Fractions, INF, or text into an extended rational."""
    if value is INF:
        return INF
    if isinstance(value, bool):
        raise TypeError("booleans are not costs")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return parse_ext(value)
    raise TypeError(f"cannot interpret {value!r} as an extended rational")


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_ext(text: str, location=None) -> ExtendedRational:
    """Parse ``"p/q"``, ``"p"`` or ``"inf"``; anything else is a ParseError."""
    if not isinstance(text, str):
        raise ParseError(f"expected a rational string, got {text!r}", location)
    s = text.strip()
    if s == "inf":
        return INF
    if not _RATIONAL_RE.match(s):
        raise ParseError(f"bad rational syntax {text!r}", location)
    if "/" in s:
        p, q = s.split("/")
        if int(q) == 0:
            raise ParseError(f"zero denominator in {text!r}", location)
        return Fraction(int(p), int(q))
    return Fraction(int(s))


def format_ext(value: ExtendedRational) -> str:
    if value is INF:
        return "inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def scale(c, value: ExtendedRational) -> ExtendedRational:
    """Non-negative scaling used for cost functions; 0 * INF is 0 here."""
    c = Fraction(c)
    if c < 0:
        raise ValueError("scaling factor must be non-negative")
    if value is INF:
        return Fraction(0) if c == 0 else INF
    return c * value
