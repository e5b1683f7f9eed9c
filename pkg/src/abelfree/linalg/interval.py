"""Exact rational intervals and rectangular complex intervals.

Endpoints are :class:`fractions.Fraction`, so arithmetic never rounds; widths
only grow through the usual interval dependency effects.  ``limit_denominator``
style outward rounding (``RatInterval.rounded``) keeps denominators bounded
when long evaluation chains are involved.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def floor_frac(q: Fraction, bits: int) -> Fraction:
    """Largest multiple of ``2**-bits`` that is ``<= q``."""
    s = 1 << bits
    return Fraction(math.floor(q * s), s)


def ceil_frac(q: Fraction, bits: int) -> Fraction:
    s = 1 << bits
    return Fraction(math.ceil(q * s), s)


def sqrt_upper(q: Fraction, bits: int = 64) -> Fraction:
    """A rational ``>= sqrt(q)`` within ``2**-bits`` of it (``q >= 0``)."""
    if q < 0:
        raise ValueError("negative argument")
    s = 1 << bits
    # sqrt(q) * s = sqrt(q * s^2)
    num = q.numerator * s * s
    r = math.isqrt(num // q.denominator)
    while Fraction(r * r, s * s) < q:
        r += 1
    return Fraction(r, s)


def sqrt_lower(q: Fraction, bits: int = 64) -> Fraction:
    if q < 0:
        raise ValueError("negative argument")
    s = 1 << bits
    r = math.isqrt(q.numerator * s * s // q.denominator)
    while r > 0 and Fraction(r * r, s * s) > q:
        r -= 1
    return Fraction(r, s)


class RatInterval:
    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = _frac(lo)
        hi = lo if hi is None else _frac(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def around(cls, centre, radius):
        centre, radius = _frac(centre), _frac(radius)
        return cls(centre - radius, centre + radius)

    def __repr__(self):
        return f"RatInterval({float(self.lo):.6g}, {float(self.hi):.6g})"

    def __eq__(self, other):
        other = _coerce(other)
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if isinstance(x, RatInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def __add__(self, other):
        other = _coerce(other)
        return RatInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        p = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return RatInterval(min(p), max(p))

    __rmul__ = __mul__

    def reciprocal(self):
        if self.contains_zero():
            raise ZeroDivisionError("interval contains zero")
        return RatInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * _coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return _coerce(other) * self.reciprocal()

    def square(self):
        if self.lo >= 0:
            return RatInterval(self.lo ** 2, self.hi ** 2)
        if self.hi <= 0:
            return RatInterval(self.hi ** 2, self.lo ** 2)
        return RatInterval(0, max(self.lo ** 2, self.hi ** 2))

    def abs(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RatInterval(0, max(-self.lo, self.hi))

    def sqrt(self, bits: int = 64):
        if self.hi < 0:
            raise ValueError("negative interval")
        return RatInterval(sqrt_lower(max(self.lo, Fraction(0)), bits), sqrt_upper(self.hi, bits))

    def hull(self, other):
        other = _coerce(other)
        return RatInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def rounded(self, bits: int):
        """Outward rounding of both endpoints to the ``2**-bits`` grid."""
        return RatInterval(floor_frac(self.lo, bits), ceil_frac(self.hi, bits))


def _coerce(x) -> RatInterval:
    return x if isinstance(x, RatInterval) else RatInterval(x)


class CInterval:
    """Rectangle ``re + i·im`` with rational interval sides."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = _coerce(re)
        self.im = _coerce(im)

    def __repr__(self):
        return f"CInterval({self.re!r}, {self.im!r})"

    @classmethod
    def disk_box(cls, cre, cim, radius):
        return cls(RatInterval.around(cre, radius), RatInterval.around(cim, radius))

    def __add__(self, other):
        other = _ccoerce(other)
        return CInterval(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return CInterval(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_ccoerce(other))

    def __rsub__(self, other):
        return _ccoerce(other) - self

    def __mul__(self, other):
        other = _ccoerce(other)
        return CInterval(self.re * other.re - self.im * other.im,
                         self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def abs2(self) -> RatInterval:
        return self.re.square() + self.im.square()

    def abs_upper(self, bits: int = 64) -> Fraction:
        return sqrt_upper(self.abs2().hi, bits)

    def abs_lower(self, bits: int = 64) -> Fraction:
        return sqrt_lower(self.abs2().lo, bits)

    def conjugate(self):
        return CInterval(self.re, -self.im)

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def reciprocal(self):
        d = self.abs2()
        if d.lo <= 0:
            raise ZeroDivisionError("complex interval may contain zero")
        return CInterval(self.re / d, -self.im / d)

    def __truediv__(self, other):
        return self * _ccoerce(other).reciprocal()

    @property
    def mid(self) -> complex:
        return complex(float(self.re.mid), float(self.im.mid))

    @property
    def width(self) -> Fraction:
        return max(self.re.width, self.im.width)

    def rounded(self, bits: int):
        return CInterval(self.re.rounded(bits), self.im.rounded(bits))


def _ccoerce(x) -> CInterval:
    if isinstance(x, CInterval):
        return x
    if isinstance(x, complex):
        return CInterval(Fraction(x.real), Fraction(x.imag))
    return CInterval(x)
