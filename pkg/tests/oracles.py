"""Independent oracles used by the tests (no code shared with the package's decision paths)."""

import math
import random
from fractions import Fraction

import mpmath
import numpy as np

from trigsos.trigpoly import BivariatePoly

CIRCLE_POINTS = [
    (Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)), (Fraction(-1), Fraction(0)), (Fraction(0), Fraction(-1)),
    (Fraction(3, 5), Fraction(4, 5)), (Fraction(5, 13), Fraction(12, 13)), (Fraction(8, 17), Fraction(15, 17)),
    (Fraction(7, 25), Fraction(24, 25)),
]


def circle_root_oracle(p: BivariatePoly, grid: int = 10**5) -> bool:
    """Does p vanish on x^2 + y^2 = 1?  Dense sign scan, then mpmath refinement of near-zero minima."""
    terms = [(i, j, float(c)) for (i, j), c in p.terms.items()]
    if not terms:
        return True
    th = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    cs, sn = np.cos(th), np.sin(th)
    g = np.zeros(grid)
    for i, j, c in terms:
        g += c * cs**i * sn**j
    if np.any(g == 0) or np.any(np.sign(g) != np.sign(np.roll(g, 1))):
        return True
    sgn = 1.0 if g[0] > 0 else -1.0
    a = sgn * g
    scale = sum(abs(c) for _, _, c in terms)
    cand = np.where((a <= np.roll(a, 1)) & (a <= np.roll(a, -1)) & (a < 1e-4 * scale))[0]
    with mpmath.workdps(80):
        exact = [(i, j, mpmath.mpf(c.numerator) / c.denominator) for (i, j), c in p.terms.items()]
        def derivs(t):
            """G, G', G'' at t from d/dt cos^i sin^j."""
            ct, st = mpmath.cos(t), mpmath.sin(t)
            g0 = g1 = g2 = mpmath.mpf(0)
            for i, j, c in exact:
                def m(a, b):
                    return ct**a * st**b if a >= 0 and b >= 0 else mpmath.mpf(0)
                g0 += c * m(i, j)
                d1 = [(-i, i - 1, j + 1), (j, i + 1, j - 1)]
                for w, a, b in d1:
                    if w:
                        g1 += c * w * m(a, b)
                        g2 += c * w * (-a * m(a - 1, b + 1) + b * m(a + 1, b - 1))
            return g0, g1, g2

        for k in cand:
            t = mpmath.mpf(float(th[k]))
            best = abs(derivs(t)[0])
            for _ in range(200):
                g0, g1, g2 = derivs(t)
                best = min(best, sgn * g0)
                if best <= 0 or g2 == 0:
                    break
                step = g1 / g2
                t -= step
                if abs(step) < mpmath.mpf(10) ** -75:
                    best = min(best, sgn * derivs(t)[0])
                    break
            if best <= mpmath.mpf(10) ** -50 * scale:
                return True
    return False


def _rand_coef(rng, height=8):
    if rng.random() < 0.8:
        return Fraction(rng.randint(-height, height))
    return Fraction(rng.randint(-height, height), rng.choice([2, 3, 4, 5, 7]))


def random_bivariate(rng: random.Random, max_deg: int = 6) -> BivariatePoly:
    deg = rng.randint(1, max_deg)
    terms = {}
    for i in range(deg + 1):
        for j in range(deg + 1 - i):
            if rng.random() < 0.5:
                terms[(i, j)] = _rand_coef(rng)
    if not terms:
        terms[(1, 0)] = Fraction(1)
    return BivariatePoly(terms)


def _mul(p: BivariatePoly, q: BivariatePoly) -> BivariatePoly:
    out = {}
    for (a, b), c in p.terms.items():
        for (e, f), d in q.terms.items():
            out[(a + e, b + f)] = out.get((a + e, b + f), Fraction(0)) + c * d
    return BivariatePoly(out)


def circle_instance(rng: random.Random, kind: int) -> BivariatePoly:
    """Mix of generic, positive, tangent and near-miss instances of total degree <= 6."""
    if kind == 0:
        return random_bivariate(rng)
    if kind == 1:  # square plus positive constant: no root
        q = random_bivariate(rng, 3)
        return _mul(q, q) + rng.choice([Fraction(1, 8), Fraction(1, 2), Fraction(2)])
    px, py = rng.choice(CIRCLE_POINTS)
    sx, sy = rng.choice([1, -1]), rng.choice([1, -1])
    px, py = sx * px, sy * py
    if kind == 2:  # squared distance to a circle point times a positive factor: tangent root
        d2 = BivariatePoly({(2, 0): 1, (1, 0): -2 * px, (0, 2): 1, (0, 1): -2 * py, (0, 0): px * px + py * py})
        q = random_bivariate(rng, 2)
        return _mul(d2, _mul(q, q) + 1)
    if kind == 3:  # tangent line shifted by 0 (touches), +c (crosses) or -c (misses)
        shift = rng.choice([Fraction(0), Fraction(1, 1000), Fraction(-1, 1000)])
        line = BivariatePoly({(1, 0): px, (0, 1): py, (0, 0): -1 + shift})
        return _mul(line, BivariatePoly({(0, 0): rng.randint(1, 8)}))
    # kind 4: square of a generic polynomial plus a tiny constant (near miss) or zero
    q = random_bivariate(rng, 3)
    return _mul(q, q) + rng.choice([Fraction(0), Fraction(1, 1024)])
