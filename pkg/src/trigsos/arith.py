"""Exact rational and Gaussian-rational arithmetic.

Rationals are plain :class:`fractions.Fraction` values (always in lowest terms
with a positive denominator).  Gaussian rationals pair two of them.  The sign
of ``r - sum(sqrt(q_i))`` is decided by interval refinement on integer square
roots, so radicals never have to be represented.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC

__all__ = [
    "Gaussian",
    "DyadicInterval",
    "Sign",
    "as_fraction",
    "bitsize",
    "height",
    "round_dyadic",
    "round_fraction",
    "sign_of_root_sum",
    "is_rational_square",
    "fraction_to_str",
    "fraction_from_str",
    "gaussian_to_json",
    "gaussian_from_json",
]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, _RationalABC)):
        return Fraction(x)
    if isinstance(x, str):
        return fraction_from_str(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


class Gaussian:
    """Complex number with rational real and imaginary parts.

    Instances are immutable and hashable; arithmetic with ints and Fractions
    is supported on either side.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_fraction(re))
        object.__setattr__(self, "im", as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("Gaussian is immutable")

    @classmethod
    def coerce(cls, x) -> "Gaussian":
        if isinstance(x, Gaussian):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x, 0)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> "Gaussian":
        g = object.__new__(cls)
        object.__setattr__(g, "re", re)
        object.__setattr__(g, "im", im)
        return g

    def conjugate(self) -> "Gaussian":
        return Gaussian._raw(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, exactly."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        if not isinstance(other, Gaussian):
            try:
                other = Gaussian.coerce(other)
            except TypeError:
                return NotImplemented
        return Gaussian._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return Gaussian._raw(-self.re, -self.im)

    def __sub__(self, other):
        if not isinstance(other, Gaussian):
            try:
                other = Gaussian.coerce(other)
            except TypeError:
                return NotImplemented
        return Gaussian._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return Gaussian.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Gaussian):
            a, b, c, d = self.re, self.im, other.re, other.im
            return Gaussian._raw(a * c - b * d, a * d + b * c)
        try:
            other = as_fraction(other)
        except TypeError:
            return NotImplemented
        return Gaussian._raw(self.re * other, self.im * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Gaussian):
            n = other.abs2()
            if n == 0:
                raise ZeroDivisionError("Gaussian division by zero")
            return self * other.conjugate() * (1 / n)
        other = as_fraction(other)
        return Gaussian._raw(self.re / other, self.im / other)

    def __rtruediv__(self, other):
        return Gaussian.coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, Gaussian):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"Gaussian({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"


ZERO = Gaussian._raw(Fraction(0), Fraction(0))
ONE = Gaussian._raw(Fraction(1), Fraction(0))


def bitsize(n: int) -> int:
    """floor(log2|n|) + 1, with the convention bitsize(0) = 1."""
    return max(abs(n).bit_length(), 1)


def _rational_height(q: Fraction) -> int:
    return bitsize(q.numerator) + bitsize(q.denominator)


def height(x) -> int:
    """Bitsize of a rational or Gaussian rational.

    ``a/b`` in lowest terms has height ``bitsize(a) + bitsize(b)``; a Gaussian
    rational takes the max over its two parts.  Zero is assigned height 1.
    """
    g = Gaussian.coerce(x)
    if not g:
        return 1
    return max(_rational_height(g.re), _rational_height(g.im))


def round_fraction(q: Fraction, bits: int) -> Fraction:
    """Nearest multiple of 2**-bits, ties toward zero."""
    if bits < 0:
        raise ValueError("bits must be >= 0")
    num = q.numerator << bits
    mag, rem = divmod(abs(num), q.denominator)
    if 2 * rem > q.denominator:
        mag += 1
    return Fraction(mag if num >= 0 else -mag, 1 << bits)


def round_dyadic(x, bits: int) -> Gaussian:
    """Round both parts of ``x`` to the nearest multiple of 2**-bits."""
    if bits < 1:
        raise ValueError("bits must be >= 1")
    g = Gaussian.coerce(x)
    return Gaussian._raw(round_fraction(g.re, bits), round_fraction(g.im, bits))


@dataclass(frozen=True)
class DyadicInterval:
    center: Fraction
    radius: Fraction

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    @property
    def lo(self) -> Fraction:
        return self.center - self.radius

    @property
    def hi(self) -> Fraction:
        return self.center + self.radius

    @property
    def width(self) -> Fraction:
        return 2 * self.radius

    def contains(self, x) -> bool:
        return abs(as_fraction(x) - self.center) <= self.radius

    @classmethod
    def from_bounds(cls, lo, hi) -> "DyadicInterval":
        lo, hi = as_fraction(lo), as_fraction(hi)
        if hi < lo:
            raise ValueError("empty interval")
        return cls((lo + hi) / 2, (hi - lo) / 2)

    @classmethod
    def from_mpi(cls, iv) -> "DyadicInterval":
        """Convert an ``mpmath.iv`` interval (dyadic endpoints) exactly."""
        return cls.from_bounds(mpf_to_fraction(iv.a), mpf_to_fraction(iv.b))

    def __float__(self):
        return float(self.center)


def mpf_to_fraction(x) -> Fraction:
    """Exact conversion of a finite mpmath real from any context."""
    import mpmath

    raw = getattr(x, "_mpf_", None)
    if raw is None:
        raw = mpmath.mpf(x)._mpf_
    sign, man, exp, _ = raw
    if not man:
        if exp:  # +-inf and nan carry a nonzero exponent code
            raise ValueError("non-finite value")
        return Fraction(0)
    man = -int(man) if sign else int(man)
    return Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)


class Sign(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ZERO = "zero"
    UNDECIDED = "undecided"


def is_rational_square(q: Fraction) -> bool:
    if q < 0:
        return False
    n, d = q.numerator, q.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def _exact_sqrt(q: Fraction) -> Fraction:
    return Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))


def sign_of_root_sum(r, q, max_bits: int = 1 << 16, start_bits: int = 64) -> Sign:
    """Sign of ``r - sum(sqrt(q_i))`` for rational ``r`` and rationals ``q_i >= 0``.

    Each square root is enclosed between consecutive multiples of 2**-p using
    integer square roots; p starts at ``start_bits`` and doubles up to
    ``max_bits``.  Zero is only reported when every radicand is a perfect
    rational square, since otherwise the sum is irrational.
    """
    r = as_fraction(r)
    radicands = [as_fraction(x) for x in q]
    if any(x < 0 for x in radicands):
        raise ValueError("radicands must be nonnegative")
    radicands = [x for x in radicands if x != 0]

    if all(is_rational_square(x) for x in radicands):
        value = r - sum((_exact_sqrt(x) for x in radicands), Fraction(0))
        if value > 0:
            return Sign.POSITIVE
        if value < 0:
            return Sign.NEGATIVE
        return Sign.ZERO

    m = len(radicands)
    p = start_bits
    while True:
        # floor(sqrt(x) * 2^p) == isqrt(floor(x * 4^p))
        lower = sum(math.isqrt((x.numerator << (2 * p)) // x.denominator) for x in radicands)
        scaled_r_num = r.numerator << p
        # r*2^p - (lower + m) > 0  => positive;  r*2^p - lower < 0 => negative
        if scaled_r_num > (lower + m) * r.denominator:
            return Sign.POSITIVE
        if scaled_r_num < lower * r.denominator:
            return Sign.NEGATIVE
        if p >= max_bits:
            return Sign.UNDECIDED
        p = min(2 * p, max_bits)


def fraction_to_str(q) -> str:
    q = as_fraction(q)
    return f"{q.numerator}/{q.denominator}"


def fraction_from_str(s: str) -> Fraction:
    s = s.strip()
    if not s:
        raise ValueError("empty rational literal")
    return Fraction(s)


def gaussian_to_json(x) -> list:
    g = Gaussian.coerce(x)
    return [fraction_to_str(g.re), fraction_to_str(g.im)]


def gaussian_from_json(v) -> Gaussian:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ValueError(f"expected [re, im] pair, got {v!r}")
    return Gaussian(fraction_from_str(str(v[0])), fraction_from_str(str(v[1])))


def common_denominator(values) -> int:
    """Least common multiple of the denominators of rationals/Gaussians."""
    m = 1
    for v in values:
        if isinstance(v, Gaussian):
            m = math.lcm(m, v.re.denominator, v.im.denominator)
        else:
            m = math.lcm(m, as_fraction(v).denominator)
    return m


def to_gaussian_ints(values, scale: int):
    """Scale Gaussians by ``scale`` and return (re, im) integer pairs.

    ``scale`` must clear every denominator.
    """
    out = []
    for v in values:
        g = Gaussian.coerce(v)
        re = g.re * scale
        im = g.im * scale
        if re.denominator != 1 or im.denominator != 1:
            raise ValueError("scale does not clear denominators")
        out.append((re.numerator, im.numerator))
    return out
