"""Exact decision of whether a polynomial vanishes on the unit circle.

The circle is parametrized by t = tan(theta/2), giving a univariate integer
polynomial whose real roots are counted with a Sturm chain.  The point
(-1, 0), which the parametrization misses, is checked separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .arith import as_fraction
from .errors import IterationCap, NotPositive
from .trigpoly import BivariatePoly, TrigPoly

__all__ = [
    "SturmChain",
    "sturm_chain",
    "sturm_real_root_count",
    "circle_polynomial",
    "has_real_root_on_circle",
    "trig_has_root_on_circle",
    "find_epsilon",
]

IntPoly = List[int]  # coefficients from the constant term upward


def _trim(p: Sequence[int]) -> IntPoly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _content(p: Sequence[int]) -> int:
    g = 0
    for c in p:
        g = math.gcd(g, c)
        if g == 1:
            break
    return g


def _primitive(p: Sequence[int]) -> IntPoly:
    g = _content(p)
    return [c // g for c in p] if g > 1 else list(p)


def _add(p: Sequence[int], q: Sequence[int]) -> IntPoly:
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _mul(p: Sequence[int], q: Sequence[int]) -> IntPoly:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _pow(p: Sequence[int], e: int) -> IntPoly:
    out: IntPoly = [1]
    base = list(p)
    while e:
        if e & 1:
            out = _mul(out, base)
        e >>= 1
        if e:
            base = _mul(base, base)
    return out


def _derivative(p: Sequence[int]) -> IntPoly:
    return [i * p[i] for i in range(1, len(p))]


def _prem(a: IntPoly, b: IntPoly) -> IntPoly:
    """Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    delta = len(a) - len(b)
    steps = 0
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lb for c in r]
        for i, c in enumerate(b):
            r[i + shift] -= lr * c
        r = _trim(r)
        steps += 1
    # make the multiplier exactly lc(b)^(delta+1)
    extra = delta + 1 - steps
    if extra > 0:
        r = [c * lb**extra for c in r]
    return r


@dataclass(frozen=True)
class SturmChain:
    """Sturm sequence with positive-factor scaling; ``polys[-1]`` is a gcd of q and q'."""

    polys: Tuple[Tuple[int, ...], ...]

    def variations_at_infinity(self, positive: bool) -> int:
        # Dividing every member by the final gcd g (square-free reduction)
        # multiplies each sign at +-inf by the same factor, so variations are
        # read directly from leading coefficients and degrees.
        signs = []
        for p in self.polys:
            s = 1 if p[-1] > 0 else -1
            if not positive and (len(p) - 1) % 2 == 1:
                s = -s
            signs.append(s)
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    def distinct_real_roots(self) -> int:
        return self.variations_at_infinity(False) - self.variations_at_infinity(True)


def _to_int_poly(q) -> IntPoly:
    q = [as_fraction(c) for c in q]
    m = 1
    for c in q:
        m = math.lcm(m, c.denominator)
    return _trim([(c * m).numerator for c in q])


def sturm_chain(q) -> SturmChain:
    p0 = _primitive(_to_int_poly(q))
    if not p0:
        raise ValueError("Sturm chain of the zero polynomial")
    chain = [p0]
    p1 = _trim(_derivative(p0))
    if p1:
        p1 = _primitive(p1)
        chain.append(p1)
        a, b = p0, p1
        while len(b) > 1:
            r = _prem(a, b)
            if not r:
                break
            delta = len(a) - len(b)
            # true remainder = r / lc(b)^(delta+1); Sturm needs its negation
            negate = not (b[-1] < 0 and (delta + 1) % 2 == 1)
            r = _primitive(r)
            if negate:
                r = [-c for c in r]
            chain.append(r)
            a, b = b, r
    return SturmChain(tuple(tuple(p) for p in chain))


def sturm_real_root_count(q) -> int:
    """Number of distinct real roots of a nonzero rational polynomial (coefficients low to high)."""
    return sturm_chain(q).distinct_real_roots()


def circle_polynomial(p: BivariatePoly) -> IntPoly:
    """Integer q(t) with q(t) = 0 iff p vanishes at ((1-t^2)/(1+t^2), 2t/(1+t^2))."""
    if not p.terms:
        return []
    m = 1
    for c in p.terms.values():
        m = math.lcm(m, c.denominator)
    D = p.total_degree
    one_minus = [1, 0, -1]
    two_t = [0, 2]
    one_plus = [1, 0, 1]
    by_total = {}
    for (i, j), c in p.terms.items():
        by_total.setdefault(i + j, []).append((i, j, (c * m).numerator))
    out: IntPoly = []
    for s, group in by_total.items():
        inner: IntPoly = []
        for i, j, c in group:
            term = _mul(_pow(one_minus, i), _pow(two_t, j))
            inner = _add(inner, [c * x for x in term])
        out = _add(out, _mul(inner, _pow(one_plus, D - s)))
    return _trim(out)


def _real_root_exists(q: IntPoly) -> bool:
    if not q:
        return True  # vanishes identically on the circle
    if len(q) == 1:
        return False
    return sturm_real_root_count(q) > 0


def has_real_root_on_circle(p: BivariatePoly) -> bool:
    """True iff p(x, y) = 0 for some real point with x^2 + y^2 = 1."""
    if p(Fraction(-1), Fraction(0)) == 0:
        return True
    return _real_root_exists(circle_polynomial(p))


# ------------------------------------------------------------ TrigPoly route

def trig_circle_polynomial(f: TrigPoly) -> Tuple[IntPoly, int]:
    """(q, m) with q(t) = m * (1+t^2)^d * f(e^{i theta}), t = tan(theta/2).

    Uses z = (1+it)/(1-it): f_k z^-k (1+t^2)^d = f_k (1-it)^(d+k) (1+it)^(d-k).
    """
    d = f.degree
    m = f.f0.denominator
    for c in f.coeffs:
        m = math.lcm(m, c.re.denominator, c.im.denominator)
    # powers of (1+it) and (1-it) as Gaussian-integer coefficient lists
    plus = [(1, 0)]
    plus_pows = [plus]
    for _ in range(2 * d):
        prev = plus_pows[-1]
        nxt = [[0, 0] for _ in range(len(prev) + 1)]
        for i, (a, b) in enumerate(prev):
            nxt[i][0] += a
            nxt[i][1] += b
            # times i*t: (a+bi)*i = -b + ai
            nxt[i + 1][0] -= b
            nxt[i + 1][1] += a
        plus_pows.append([tuple(x) for x in nxt])

    def minus_pow(e):
        # (1-it)^e is the coefficientwise conjugate of (1+it)^e
        return [(a, -b) for a, b in plus_pows[e]]

    f0 = (f.f0 * m).numerator
    q = [f0 * math.comb(d, j // 2) if j % 2 == 0 else 0 for j in range(2 * d + 1)]
    for k, c in enumerate(f.coeffs, start=1):
        cr, ci = (c.re * m).numerator, (c.im * m).numerator
        if not cr and not ci:
            continue
        A = minus_pow(d + k)
        B = plus_pows[d - k]
        # real part of (cr + ci i) * A * B, doubled
        for i, (ar, ai) in enumerate(A):
            if not ar and not ai:
                continue
            for j, (br, bi) in enumerate(B):
                pr = ar * br - ai * bi
                pi = ar * bi + ai * br
                q[i + j] += 2 * (cr * pr - ci * pi)
    return _trim(q), m


def trig_has_root_on_circle(f: TrigPoly, shift=0) -> bool:
    """True iff f - shift vanishes somewhere on |z| = 1."""
    shift = as_fraction(shift)
    g = f - shift if shift else f
    if g.is_zero():
        return True
    q, _ = trig_circle_polynomial(g)
    at_minus_one = g.f0 + 2 * sum(((-1) ** k * c.re for k, c in enumerate(g.coeffs, start=1)), Fraction(0))
    if at_minus_one == 0:
        return True
    return _real_root_exists(q)


def find_epsilon(f: TrigPoly, cap: int = 1 << 16) -> Fraction:
    """First eps in 1, 1/2, 1/4, ... with f - eps free of circle roots.

    Raises NotPositive unless f itself has no circle root and f(1) > 0, and
    IterationCap after ``cap`` halvings.
    """
    if f.is_zero() or f.value_at_one() <= 0 or trig_has_root_on_circle(f):
        raise NotPositive("polynomial is not positive on the unit circle")
    d = f.degree
    q_f, m = trig_circle_polynomial(f)
    # q for (f - eps) is q_f - m*eps*(1+t^2)^d
    one_plus_d = [math.comb(d, j // 2) if j % 2 == 0 else 0 for j in range(2 * d + 1)]
    f_at_minus_one = f.f0 + 2 * sum(((-1) ** k * c.re for k, c in enumerate(f.coeffs, start=1)), Fraction(0))
    eps = Fraction(1)
    for _ in range(cap + 1):
        if f_at_minus_one != eps:
            # m*eps = num/den; scale q_f by den to stay integral
            me = m * eps
            num, den = me.numerator, me.denominator
            q = _trim(_add([den * c for c in q_f], [-num * c for c in one_plus_d]))
            if not _real_root_exists(q):
                return eps
        eps /= 2
    raise IterationCap(f"no admissible epsilon after {cap} halvings")
