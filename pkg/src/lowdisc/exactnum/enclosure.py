"""Rational intervals with outward rounding.

Endpoints are :class:`fractions.Fraction` values, so every arithmetic
operation below is exact; outward rounding only happens in
:meth:`Enclosure.round_outward`, which callers use to keep denominators small.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Union

Rational = Fraction
Number = Union[int, Fraction]


def as_rational(x) -> Fraction:
    """Coerce ``x`` to a Fraction without loss.

    Floats convert exactly (``0.1`` becomes its binary value, not ``1/10``).
    Strings accept ``"num/den"`` and decimal literals.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, Enclosure):
        raise TypeError("cannot coerce an Enclosure to a single rational")
    return Fraction(x)


def format_rational(x) -> str:
    """Serialize as ``"num/den"`` (always with a denominator)."""
    x = as_rational(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


def _floor_log10(x: Fraction) -> int:
    # largest e with 10**e <= x, for x > 0
    bits = x.numerator.bit_length() - x.denominator.bit_length()
    e = math.floor(bits * 0.30102999566398120)
    while Fraction(10) ** e > x:
        e -= 1
    while Fraction(10) ** (e + 1) <= x:
        e += 1
    return e


def format_decimal(x, digits: int = 17, rounding: str = "nearest") -> str:
    """Scientific decimal with ``digits`` significant digits.

    ``rounding`` is ``"down"`` (toward -inf), ``"up"`` (toward +inf) or
    ``"nearest"``. The output is a valid float literal and parses back with
    :func:`parse_rational`.
    """
    x = as_rational(x)
    if x == 0:
        return "0"
    sign = "-" if x < 0 else ""
    ax = abs(x)
    e = _floor_log10(ax)
    scaled = ax * Fraction(10) ** (digits - 1 - e)
    if rounding == "nearest":
        mant = round(scaled)
    else:
        toward_floor = (rounding == "down") != (x < 0)
        mant = math.floor(scaled) if toward_floor else math.ceil(scaled)
    if mant >= 10**digits:
        mant //= 10
        e += 1
        # dropping a digit after a carry is exact: mant ends in 0
    s = str(mant).rjust(digits, "0")
    body = s[0] + ("." + s[1:] if digits > 1 else "")
    return f"{sign}{body}e{e:+03d}"


def _is_terminating(x: Fraction) -> bool:
    d = x.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def format_exact(x) -> str:
    """Lossless text form: a plain decimal when it terminates, else ``num/den``."""
    x = as_rational(x)
    if x.denominator == 1:
        return str(x.numerator)
    if not _is_terminating(x):
        return format_rational(x)
    d = x.denominator
    k = 0
    while 10**k % d:
        k += 1
    n = abs(x.numerator) * (10**k // d)
    s = str(n).rjust(k + 1, "0")
    sign = "-" if x < 0 else ""
    return f"{sign}{s[:-k]}.{s[-k:]}"


class Position(enum.Enum):
    """Where an enclosure sits relative to a rational."""

    BELOW = -1
    STRADDLES = 0
    ABOVE = 1


@dataclass(frozen=True)
class Enclosure:
    """Closed rational interval ``[lo, hi]`` known to contain some real value."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        if lo > hi:
            raise ValueError(f"empty enclosure: lo={lo} > hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def exact(cls, x) -> "Enclosure":
        x = as_rational(x)
        return cls(x, x)

    @classmethod
    def around(cls, center, radius) -> "Enclosure":
        c, r = as_rational(center), as_rational(radius)
        return cls(c - r, c + r)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __float__(self) -> float:
        return float(self.mid)

    def contains(self, x) -> bool:
        if isinstance(x, Enclosure):
            return self.lo <= x.lo and x.hi <= self.hi
        x = as_rational(x)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def overlaps(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def compare(self, r) -> Position:
        """Three-valued comparison; callers refine on ``STRADDLES``."""
        r = as_rational(r)
        if self.hi < r:
            return Position.BELOW
        if self.lo > r:
            return Position.ABOVE
        return Position.STRADDLES

    def round_outward(self, bits: int) -> "Enclosure":
        """Smallest enclosure with dyadic endpoints of denominator ``2**bits``."""
        s = 1 << bits
        lo = Fraction(math.floor(self.lo * s), s)
        hi = Fraction(math.ceil(self.hi * s), s)
        return Enclosure(lo, hi)

    def hull(self, other) -> "Enclosure":
        o = _coerce(other)
        return Enclosure(min(self.lo, o.lo), max(self.hi, o.hi))

    def widen(self, amount) -> "Enclosure":
        a = as_rational(amount)
        return Enclosure(self.lo - a, self.hi + a)

    # arithmetic -------------------------------------------------------

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __add__(self, other):
        o = _coerce(other)
        return Enclosure(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        return Enclosure(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        o = _coerce(other)
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Enclosure(min(c), max(c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError(f"division by an enclosure containing 0: {o}")
        return self * Enclosure(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise TypeError("Enclosure ** only supports integer exponents; use power()")
        if n < 0:
            return 1 / (self ** (-n))
        if n == 0:
            return Enclosure.exact(1)
        a, b = self.lo**n, self.hi**n
        if n % 2 == 0:
            if self.lo <= 0 <= self.hi:
                return Enclosure(0, max(a, b))
            return Enclosure(min(a, b), max(a, b))
        return Enclosure(a, b)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Enclosure(0, max(-self.lo, self.hi))

    # text ---------------------------------------------------------------

    def serialize(self) -> str:
        """Lossless ``[lo, hi]`` text; see :meth:`parse`."""
        return f"[{format_exact(self.lo)}, {format_exact(self.hi)}]"

    @classmethod
    def parse(cls, text: str) -> "Enclosure":
        m = re.fullmatch(r"\s*\[\s*([^,\]]+?)\s*,\s*([^,\]]+?)\s*\]\s*", text)
        if not m:
            raise ValueError(f"not an enclosure: {text!r}")
        return cls(parse_rational(m.group(1)), parse_rational(m.group(2)))

    def format(self, digits: int = 12) -> str:
        """Outward-rounded ``[lo, hi]`` with ``digits`` significant digits."""
        if self.is_exact and _is_terminating(self.lo) and digits >= 17:
            return self.serialize()
        return (
            f"[{format_decimal(self.lo, digits, 'down')}, "
            f"{format_decimal(self.hi, digits, 'up')}]"
        )

    def __str__(self):
        return self.format()


def _coerce(x) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    return Enclosure.exact(x)


def as_enclosure(x) -> Enclosure:
    return _coerce(x)
