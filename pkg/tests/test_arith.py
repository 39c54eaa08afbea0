import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from trigsos.arith import (
    DyadicInterval,
    Gaussian,
    Sign,
    fraction_from_str,
    fraction_to_str,
    gaussian_from_json,
    gaussian_to_json,
    height,
    mpf_to_fraction,
    round_dyadic,
    sign_of_root_sum,
)

rationals = st.fractions(max_denominator=10**6).filter(lambda q: abs(q) < 10**6)
gaussians = st.builds(Gaussian, rationals, rationals)


class TestHeight:
    def test_zero(self):
        assert height(0) == 1

    def test_integer(self):
        assert height(5) == 4

    def test_gaussian(self):
        assert height(Gaussian(Fraction(1, 57), Fraction(1, 57))) == 7

    @given(gaussians)
    def test_sign_invariant(self, x):
        h = height(x)
        assert height(Gaussian(-x.re, x.im)) == h
        assert height(Gaussian(x.re, -x.im)) == h
        assert height(Gaussian(-x.re, -x.im)) == h


class TestRoundDyadic:
    def test_third(self):
        assert round_dyadic(Fraction(1, 3), 2) == Gaussian(Fraction(1, 4))

    def test_already_dyadic(self):
        assert round_dyadic(Fraction(1, 2), 1) == Gaussian(Fraction(1, 2))
        a = Gaussian(Fraction(-7, 4), Fraction(-7, 4))
        assert round_dyadic(a, 16) == a

    def test_ties_toward_zero(self):
        assert round_dyadic(Fraction(3, 8), 2) == Gaussian(Fraction(1, 4))
        assert round_dyadic(Fraction(-3, 8), 2) == Gaussian(Fraction(-1, 4))

    def test_bits_must_be_positive(self):
        with pytest.raises(ValueError):
            round_dyadic(Fraction(1, 3), 0)

    @given(gaussians, st.integers(1, 80))
    def test_error_bound(self, x, bits):
        r = round_dyadic(x, bits)
        assert abs(r.re - x.re) <= Fraction(1, 2**bits)
        assert abs(r.im - x.im) <= Fraction(1, 2**bits)
        assert (r.re * 2**bits).denominator == 1 and (r.im * 2**bits).denominator == 1


def _sign(x):
    return Sign.POSITIVE if x > 0 else Sign.NEGATIVE if x < 0 else Sign.ZERO


def brute_sign(r, q):
    """Exact when every radicand is a square; otherwise 200-digit evaluation.

    A sum of square roots of rationals is rational only when each root is, so a
    non-square radicand rules out zero, and at heights <= 16 the gap is far above 10^-200.
    """
    with mpmath.workdps(200):
        v = mpmath.mpf(r.numerator) / r.denominator - sum(mpmath.sqrt(mpmath.mpf(x.numerator) / x.denominator) for x in q)
        if all(math.isqrt(x.numerator) ** 2 == x.numerator and math.isqrt(x.denominator) ** 2 == x.denominator for x in q):
            exact = r - sum(Fraction(math.isqrt(x.numerator), math.isqrt(x.denominator)) for x in q)
            return _sign(exact)
        return Sign.POSITIVE if v > 0 else Sign.NEGATIVE


def exact_sign_two(r, q):
    """sign(r - sqrt(a) - sqrt(b)) by squaring: r > sqrt(a)+sqrt(b) iff r > 0 and r^2 - a - b > 2 sqrt(ab)."""
    a, b = (list(q) + [Fraction(0), Fraction(0)])[:2]
    if r <= 0:
        return Sign.NEGATIVE if (a or b or r < 0) else Sign.ZERO
    t = r * r - a - b
    if t < 0:
        return Sign.NEGATIVE
    return _sign(t * t - 4 * a * b)


class TestSignOfRootSum:
    def test_worked_example_term(self):
        assert sign_of_root_sum(1, [Fraction(8, 3249)]) is Sign.POSITIVE

    def test_empty(self):
        assert sign_of_root_sum(0, []) is Sign.ZERO

    def test_negative(self):
        assert sign_of_root_sum(3, [4, 4]) is Sign.NEGATIVE

    def test_exact_zero_with_squares(self):
        assert sign_of_root_sum(Fraction(5, 6), [Fraction(1, 4), Fraction(1, 9)]) is Sign.ZERO

    def test_undecided_at_low_cap(self):
        # 2 - sqrt(2) - sqrt(2 - 2^-300)^... margin far below 2^-64
        tiny = Fraction(1, 2**400)
        r = Fraction(2)
        q = [Fraction(1), 1 - tiny]  # 2 - 1 - sqrt(1 - tiny) ~ tiny/2
        assert sign_of_root_sum(r, q, max_bits=128) is Sign.UNDECIDED
        assert sign_of_root_sum(r, q, max_bits=4096) is Sign.POSITIVE

    @given(
        st.fractions(min_value=-20, max_value=20, max_denominator=2**8),
        st.lists(st.fractions(min_value=0, max_value=50, max_denominator=2**8), max_size=2),
    )
    def test_against_squaring_oracle(self, r, q):
        assert sign_of_root_sum(r, q) is exact_sign_two(r, q)

    @given(
        st.fractions(min_value=-20, max_value=20, max_denominator=2**8),
        st.lists(st.fractions(min_value=0, max_value=50, max_denominator=2**8), max_size=3),
    )
    def test_against_high_precision(self, r, q):
        assert sign_of_root_sum(r, q) is brute_sign(r, q)


class TestSerialization:
    @given(rationals)
    def test_fraction_roundtrip(self, q):
        s = fraction_to_str(q)
        assert "/" in s
        assert fraction_from_str(s) == q

    @given(gaussians)
    def test_gaussian_roundtrip(self, x):
        assert gaussian_from_json(gaussian_to_json(x)) == x


def test_mpf_to_fraction_keeps_sign_and_precision():
    ctx = mpmath.MPContext()
    ctx.prec = 300
    x = -ctx.mpf(1) / 3
    q = mpf_to_fraction(x)
    assert q < 0 and abs(q + Fraction(1, 3)) < Fraction(1, 2**290)
    with pytest.raises(ValueError):
        mpf_to_fraction(mpmath.inf)


def test_dyadic_interval():
    iv = DyadicInterval.from_bounds(Fraction(1, 4), Fraction(3, 4))
    assert iv.center == Fraction(1, 2) and iv.width == Fraction(1, 2)
    assert iv.contains(Fraction(1, 4)) and not iv.contains(1)
    with pytest.raises(ValueError):
        DyadicInterval(0, -1)


def test_gaussian_arithmetic():
    a = Gaussian(1, 2)
    b = Gaussian(Fraction(1, 2), -3)
    assert a * b == Gaussian(Fraction(1, 2) + 6, -3 + 1)
    assert (a / b) * b == a
    assert a.conjugate().conjugate() == a
    assert a.abs2() == 5
    assert a - a == Gaussian(0)
