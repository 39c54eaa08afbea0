"""Hermitian trigonometric polynomials and ordinary polynomials in z.

A :class:`TrigPoly` stores ``f0`` and the coefficients of ``z^-1 .. z^-d``; the
``z^k`` half is implied by conjugation, so every value is Hermitian by
construction.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import (
    DyadicInterval,
    Gaussian,
    ZERO,
    as_fraction,
    common_denominator,
    fraction_from_str,
    fraction_to_str,
    gaussian_from_json,
    gaussian_to_json,
)
from .errors import ParseError

__all__ = [
    "TrigPoly",
    "ComplexPoly",
    "LaurentPoly",
    "BivariatePoly",
    "mul_star",
    "star",
    "to_real_bivariate",
    "eval_circle",
    "parse_trigpoly",
    "trigpoly_from_json",
    "trigpoly_to_json",
    "load_trigpoly",
    "gauss_family",
]


def _trim(coeffs: Sequence[Gaussian]) -> Tuple[Gaussian, ...]:
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


@dataclass(frozen=True)
class TrigPoly:
    """f0 + sum_k (f_k z^-k + conj(f_k) z^k).

    ``coeffs[k-1]`` is f_k.  Trailing zero coefficients are dropped on
    construction, so ``d`` is the true degree (``None`` for the zero
    polynomial).
    """

    f0: Fraction
    coeffs: Tuple[Gaussian, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "f0", as_fraction(self.f0))
        object.__setattr__(self, "coeffs", _trim(Gaussian.coerce(c) for c in self.coeffs))

    @property
    def d(self) -> Optional[int]:
        if not self.coeffs and self.f0 == 0:
            return None
        return len(self.coeffs)

    @property
    def degree(self) -> int:
        """Degree with the zero polynomial mapped to 0 (for sizing loops)."""
        return len(self.coeffs)

    def coeff(self, k: int) -> Gaussian:
        """Coefficient of z^-k for any integer k (negative k gives z^|k|)."""
        if k == 0:
            return Gaussian(self.f0)
        if abs(k) > len(self.coeffs):
            return ZERO
        c = self.coeffs[abs(k) - 1]
        return c if k > 0 else c.conjugate()

    def is_zero(self) -> bool:
        return self.d is None

    def __add__(self, other):
        other = _as_trig(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return TrigPoly(self.f0 + other.f0, [self.coeff(k) + other.coeff(k) for k in range(1, n + 1)])

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly(-self.f0, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_trig(other))

    def __rsub__(self, other):
        return _as_trig(other) - self

    def scale(self, c) -> "TrigPoly":
        c = as_fraction(c)
        return TrigPoly(self.f0 * c, [x * c for x in self.coeffs])

    def __mul__(self, c):
        if isinstance(c, TrigPoly):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def value_at_one(self) -> Fraction:
        """f(1) = f0 + 2 sum Re f_k, exactly."""
        return self.f0 + 2 * sum((c.re for c in self.coeffs), Fraction(0))

    def to_laurent(self) -> "LaurentPoly":
        d = len(self.coeffs)
        terms = [self.coeff(d - j) for j in range(2 * d + 1)]
        return LaurentPoly(-d, terms)

    def __str__(self):
        parts = [str(self.f0)]
        for k, c in enumerate(self.coeffs, start=1):
            if c:
                parts.append(f"{_coef_str(c)}*z^-{k}")
                parts.append(f"{_coef_str(c.conjugate())}*z^{k}")
        return " + ".join(parts)


def _coef_str(c: Gaussian) -> str:
    if c.im == 0:
        return f"({c.re})"
    sign = "+" if c.im >= 0 else "-"
    return f"({c.re}{sign}{abs(c.im)}i)"


def _as_trig(x) -> TrigPoly:
    if isinstance(x, TrigPoly):
        return x
    g = Gaussian.coerce(x)
    if g.im != 0:
        raise ValueError("constant term of a trigonometric polynomial must be real")
    return TrigPoly(g.re)


@dataclass(frozen=True)
class ComplexPoly:
    """Ordinary polynomial sum_k c_k z^k, ``coeffs`` from the constant term up."""

    coeffs: Tuple[Gaussian, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(Gaussian.coerce(c) for c in self.coeffs))

    @property
    def degree(self) -> Optional[int]:
        return len(self.coeffs) - 1 if self.coeffs else None

    def __mul__(self, other):
        if not isinstance(other, ComplexPoly):
            other = ComplexPoly((Gaussian.coerce(other),))
        if not self.coeffs or not other.coeffs:
            return ComplexPoly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return ComplexPoly(out)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        get = lambda p, i: p.coeffs[i] if i < len(p.coeffs) else ZERO
        return ComplexPoly([get(self, i) + get(other, i) for i in range(n)])

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def star(self) -> "LaurentPoly":
        return star(self)

    def to_json(self) -> list:
        return [gaussian_to_json(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "ComplexPoly":
        return cls([gaussian_from_json(c) for c in data])


@dataclass(frozen=True)
class LaurentPoly:
    """sum_j terms[j] z^(low + j); the general carrier for star images and parsing."""

    low: int
    terms: Tuple[Gaussian, ...]

    def __post_init__(self):
        terms = [Gaussian.coerce(t) for t in self.terms]
        low = self.low
        while terms and not terms[-1]:
            terms.pop()
        while terms and not terms[0]:
            terms.pop(0)
            low += 1
        if not terms:
            low = 0
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "terms", tuple(terms))

    def as_dict(self) -> Dict[int, Gaussian]:
        return {self.low + j: t for j, t in enumerate(self.terms) if t}

    @classmethod
    def from_dict(cls, terms: Dict[int, Gaussian]) -> "LaurentPoly":
        terms = {e: c for e, c in terms.items() if c}
        if not terms:
            return cls(0, ())
        lo, hi = min(terms), max(terms)
        return cls(lo, [terms.get(e, ZERO) for e in range(lo, hi + 1)])

    def star(self) -> "LaurentPoly":
        return LaurentPoly(-(self.low + len(self.terms) - 1), [t.conjugate() for t in reversed(self.terms)])

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not self.terms or not other.terms:
            return LaurentPoly(0, ())
        out = [ZERO] * (len(self.terms) + len(other.terms) - 1)
        for i, a in enumerate(self.terms):
            for j, b in enumerate(other.terms):
                out[i + j] = out[i + j] + a * b
        return LaurentPoly(self.low + other.low, out)

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = self.as_dict()
        for e, c in other.as_dict().items():
            out[e] = out.get(e, ZERO) + c
        return LaurentPoly.from_dict(out)

    def to_trigpoly(self) -> TrigPoly:
        """Convert, checking the Hermitian symmetry c_{-k} = conj(c_k)."""
        t = self.as_dict()
        f0 = t.get(0, ZERO)
        if f0.im != 0:
            raise ValueError("constant term is not real")
        d = max((abs(e) for e in t), default=0)
        coeffs = []
        for k in range(1, d + 1):
            a, b = t.get(-k, ZERO), t.get(k, ZERO)
            if a != b.conjugate():
                raise ValueError(f"coefficients of z^-{k} and z^{k} are not conjugate")
            coeffs.append(a)
        return TrigPoly(f0.re, coeffs)


def star(s) -> LaurentPoly:
    """s*(z) = sum conj(s_k) z^-k."""
    if isinstance(s, LaurentPoly):
        return s.star()
    s = s if isinstance(s, ComplexPoly) else ComplexPoly(s)
    n = len(s.coeffs)
    return LaurentPoly(-(n - 1) if n else 0, [c.conjugate() for c in reversed(s.coeffs)])


def _gauss_int_vector(values: Sequence[Gaussian]):
    m = common_denominator(values)
    re = [(v.re * m).numerator for v in values]
    im = [(v.im * m).numerator for v in values]
    return m, re, im


def mul_star_ints(re: Sequence[int], im: Sequence[int]):
    """Integer kernel of s s*: returns (c0, [(Re f_k, Im f_k)]) for Gaussian-integer s."""
    n = len(re)
    out = []
    c0 = sum(a * a + b * b for a, b in zip(re, im))
    for k in range(1, n):
        sr = si = 0
        # s_i * conj(s_{i+k})
        for i in range(n - k):
            a, b, c, d = re[i], im[i], re[i + k], im[i + k]
            sr += a * c + b * d
            si += b * c - a * d
        out.append((sr, si))
    return c0, out


def mul_star(s) -> TrigPoly:
    """s * s* as a TrigPoly; the coefficient of z^-k is sum_i s_i conj(s_{i+k})."""
    s = s if isinstance(s, ComplexPoly) else ComplexPoly(s)
    if not s.coeffs:
        return TrigPoly(0)
    m, re, im = _gauss_int_vector(s.coeffs)
    c0, rest = mul_star_ints(re, im)
    m2 = m * m
    return TrigPoly(Fraction(c0, m2), [Gaussian(Fraction(a, m2), Fraction(b, m2)) for a, b in rest])


@dataclass(frozen=True)
class BivariatePoly:
    """Real polynomial sum c_{ij} x^i y^j with rational coefficients."""

    terms: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (i, j), c in self.terms.items():
            c = as_fraction(c)
            if c:
                clean[(int(i), int(j))] = c
        object.__setattr__(self, "terms", clean)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    @property
    def total_degree(self) -> int:
        return max((i + j for i, j in self.terms), default=0)

    def __sub__(self, other):
        other = other if isinstance(other, BivariatePoly) else BivariatePoly({(0, 0): as_fraction(other)})
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) - c
        return BivariatePoly(out)

    def __add__(self, other):
        other = other if isinstance(other, BivariatePoly) else BivariatePoly({(0, 0): as_fraction(other)})
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return BivariatePoly(out)

    def __call__(self, x, y):
        return sum((c * x**i * y**j for (i, j), c in self.terms.items()), Fraction(0) if isinstance(x, (int, Fraction)) else 0)

    def __eq__(self, other):
        if isinstance(other, BivariatePoly):
            return self.terms == other.terms
        return NotImplemented


def to_real_bivariate(f: TrigPoly) -> BivariatePoly:
    """Substitute z = x+iy and z^-1 = x-iy; agrees with f on x^2+y^2 = 1."""
    terms: Dict[Tuple[int, int], Fraction] = {}
    if f.f0:
        terms[(0, 0)] = f.f0
    for k, c in enumerate(f.coeffs, start=1):
        a, b = c.re, c.im
        # 2 Re(f_k (x - iy)^k); Re((a+bi)(-i)^j) cycles a, b, -a, -b
        cyc = (a, b, -a, -b)
        for j in range(k + 1):
            v = cyc[j % 4]
            if v:
                key = (k - j, j)
                terms[key] = terms.get(key, Fraction(0)) + 2 * math.comb(k, j) * v
    return BivariatePoly(terms)


def eval_circle(f: TrigPoly, theta_samples: int, prec: int = 64) -> List[DyadicInterval]:
    """Interval enclosures of f(e^{i theta_j}) at theta_j = 2 pi j / n."""
    if theta_samples < 1:
        raise ValueError("theta_samples must be >= 1")
    from mpmath.ctx_iv import MPIntervalContext

    iv = MPIntervalContext()
    iv.prec = prec
    out = []
    two_pi = 2 * iv.pi
    for j in range(theta_samples):
        theta = two_pi * j / theta_samples
        acc = iv.mpf(f.f0.numerator) / f.f0.denominator
        for k, c in enumerate(f.coeffs, start=1):
            if not c:
                continue
            a = iv.mpf(c.re.numerator) / c.re.denominator
            b = iv.mpf(c.im.numerator) / c.im.denominator
            acc += 2 * (a * iv.cos(k * theta) + b * iv.sin(k * theta))
        out.append(DyadicInterval.from_mpi(acc))
    return out


# ---------------------------------------------------------------- text input

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<num>\d+(?:\.\d+)?(?:/\d+)?)|(?P<i>[iI])|(?P<z>z)"
    r"|(?P<op>[-+*^(){}])"
)


class _Parser:
    def __init__(self, text: str):
        self.tokens = []
        line, col, pos = 1, 1, 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line, col)
            kind = m.lastgroup
            val = m.group()
            if kind == "nl":
                line, col = line + 1, 1
            elif kind != "ws":
                self.tokens.append((kind, val, line, col))
                col += len(val)
            else:
                col += len(val)
            pos = m.end()
        self.tokens.append(("eof", "", line, col))
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2], tok[3])

    def expect(self, val):
        tok = self.take()
        if tok[1] != val:
            self.fail(f"expected {val!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def parse(self) -> LaurentPoly:
        if self.peek()[0] == "eof":
            self.fail("empty polynomial")
        out = self.expr()
        if self.peek()[0] != "eof":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return out

    def expr(self) -> LaurentPoly:
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = LaurentPoly(0, (Gaussian(-1),)) * acc
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            neg = self.take()[1] == "-"
            t = self.term()
            if neg:
                t = LaurentPoly(0, (Gaussian(-1),)) * t
            acc = acc + t
        return acc

    def term(self) -> LaurentPoly:
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
                acc = acc * self.factor()
            elif tok[0] in ("num", "i", "z") or (tok[0] == "op" and tok[1] == "("):
                # implicit multiplication such as 2z or 3(1+i)
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> LaurentPoly:
        tok = self.take()
        kind, val = tok[0], tok[1]
        if kind == "num":
            q = fraction_from_str(val)
            if self.peek()[0] == "i":
                self.take()
                return LaurentPoly(0, (Gaussian(0, q),))
            return LaurentPoly(0, (Gaussian(q),))
        if kind == "i":
            return LaurentPoly(0, (Gaussian(0, 1),))
        if kind == "z":
            e = 1
            if self.peek()[1] == "^":
                self.take()
                e = self.exponent()
            return LaurentPoly(e, (Gaussian(1),))
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        self.fail(f"unexpected {val or 'end of input'!r}", tok)

    def exponent(self) -> int:
        close = None
        if self.peek()[1] in ("{", "("):
            close = "}" if self.take()[1] == "{" else ")"
        sign = 1
        if self.peek()[1] in ("-", "+") and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        tok = self.take()
        if tok[0] != "num" or not tok[1].isdigit():
            self.fail("exponent must be an integer", tok)
        if close:
            self.expect(close)
        return sign * int(tok[1])


def parse_trigpoly(text: str) -> TrigPoly:
    """Parse text such as ``5 + (1+1i)*z^-1 + (1-1i)*z^1``.

    The result must be Hermitian; otherwise a ParseError is raised.
    """
    laurent = _Parser(text).parse()
    try:
        return laurent.to_trigpoly()
    except ValueError as exc:
        raise ParseError(f"not a Hermitian trigonometric polynomial: {exc}") from None


def trigpoly_to_json(f: TrigPoly) -> dict:
    return {
        "d": f.degree,
        "f0": fraction_to_str(f.f0),
        "coeffs": [gaussian_to_json(c) for c in f.coeffs],
    }


def trigpoly_from_json(data) -> TrigPoly:
    try:
        f0 = fraction_from_str(str(data["f0"]))
        coeffs = [gaussian_from_json(c) for c in data.get("coeffs", [])]
        d = int(data.get("d", len(coeffs)))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad polynomial JSON: {exc}") from None
    if d != len(coeffs):
        raise ParseError(f"declared degree {d} but {len(coeffs)} coefficients given")
    return TrigPoly(f0, coeffs)


def load_trigpoly(text: str) -> TrigPoly:
    """Accept either the JSON form or the text form."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        return trigpoly_from_json(data)
    return parse_trigpoly(text)


def gauss_family(d: int) -> TrigPoly:
    """f_d = 10d + sum_{k=1}^d ((1-i) z^-k + (1+i) z^k), positive since z^-k + z^k >= -2."""
    return TrigPoly(10 * d, [Gaussian(1, -1)] * d)
