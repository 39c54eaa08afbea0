"""Complex roots of z^d (f - eps) and their reciprocal-conjugate pairing.

Roots are found with Aberth-Ehrlich iteration: a float pass in numpy for the
starting point, then fixed-point polishing on Python integers at a working
precision that doubles until the residual contract (checked in mpmath) holds.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .arith import Gaussian, mpf_to_fraction, round_fraction
from .errors import PairingFailed, PrecisionExhausted
from .trigpoly import ComplexPoly, TrigPoly

__all__ = ["RootSet", "complex_roots", "separation_lower_bound", "pair_reciprocal", "self_inversive_poly"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RootSet:
    """2d root approximations; ``pairing[i] = (j, j')`` with roots[j] the larger-modulus member."""

    roots: Tuple[Gaussian, ...]
    pairing: Tuple[Tuple[int, int], ...]
    precision: int

    @property
    def primaries(self) -> List[Gaussian]:
        return [self.roots[j] for j, _ in self.pairing]


def self_inversive_poly(f_eps: TrigPoly) -> ComplexPoly:
    """g(z) = z^d f_eps(z); the z^j coefficient is the z^(j-d) coefficient of f_eps."""
    d = f_eps.degree
    return ComplexPoly([f_eps.coeff(d - j) for j in range(2 * d + 1)])


def separation_lower_bound(g) -> Fraction:
    """Rational lower bound on sqrt(3) / (n^(n/2+1) ||g||^(n-1)) for Gaussian-integer g.

    Returns 0 for degree <= 1, where root separation is vacuous.
    """
    g = g if isinstance(g, ComplexPoly) else ComplexPoly(g)
    n = g.degree
    if n is None or n <= 1:
        return Fraction(0)
    norm2 = 0
    for c in g.coeffs:
        if c.re.denominator != 1 or c.im.denominator != 1:
            raise ValueError("separation bound needs Gaussian-integer coefficients")
        norm2 += c.re.numerator ** 2 + c.im.numerator ** 2
    # bound^2 = 3 / (n^(n+2) * N^(n-1))
    den = n ** (n + 2) * norm2 ** (n - 1)
    bits = den.bit_length() // 2 + 32
    # floor(sqrt(3 * 4^bits / den)) / 2^bits <= bound
    return Fraction(math.isqrt((3 << (2 * bits)) // den), 1 << bits)


def _aberth_float(coeffs: np.ndarray, rng: np.random.Generator, iters: int = 500) -> np.ndarray:
    """Float Aberth iteration; coeffs from the constant term upward."""
    n = len(coeffs) - 1
    lead = coeffs[-1]
    # slightly above the Cauchy bound 1 + max |a_k / a_n|, angularly perturbed
    radius = 1.1 * (1 + float(np.max(np.abs(coeffs[:-1] / lead)))) if n else 1.0
    offset = rng.uniform(0, 2 * math.pi / max(n, 1))
    angles = 2 * math.pi * np.arange(n) / n + offset + 0.4
    z = radius * np.exp(1j * angles)
    rev = coeffs[::-1]  # numpy order: highest degree first
    d1 = np.polyder(rev)
    r_rev = coeffs  # the reversed polynomial in numpy order is the ascending list
    r_d1 = np.polyder(r_rev)
    for _ in range(iters):
        big = np.abs(z) > 1
        ratio = np.empty_like(z)
        zs = z[~big]
        ratio[~big] = np.polyval(rev, zs) / np.polyval(d1, zs)
        zb = z[big]
        w = 1 / zb
        q = np.polyval(r_rev, w)
        dq = np.polyval(r_d1, w)
        ratio[big] = zb * q / (n * q - w * dq)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1)
        inv = 1 / diff
        np.fill_diagonal(inv, 0)
        s = inv.sum(axis=1)
        step = ratio / (1 - ratio * s)
        step = np.where(np.isfinite(step), step, 0)
        z = z - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1, np.abs(z))):
            break
    return z


def _to_gaussian(ctx, x, bits_rel: int) -> Gaussian:
    mag = abs(x)
    shift = 0
    if mag != 0:
        shift = max(0, -int(ctx.floor(ctx.log(mag, 2))))
    bits = bits_rel + 1 + shift
    return Gaussian(round_fraction(mpf_to_fraction(x.real), bits), round_fraction(mpf_to_fraction(x.imag), bits))


def _polish(ctx, g: ComplexPoly, z, target_bits: int, max_sweeps: int = 60):
    """Aberth sweeps in W-bit fixed point on Python integers, W = ctx.prec.

    Roots of modulus above 1 are updated through the reversed polynomial.
    The result is handed back as mpc values; the residual test is done
    separately in mpmath, so rounding here can only cost a retry.
    """
    W = ctx.prec
    S = 1 << W
    n = len(g.coeffs) - 1
    cs = [((c.re.numerator << W) // c.re.denominator, (c.im.numerator << W) // c.im.denominator) for c in g.coeffs]
    zs = [(int(ctx.floor(ctx.ldexp(x.real, W))), int(ctx.floor(ctx.ldexp(x.imag, W)))) for x in z]
    T = S >> min(target_bits + 2, W)

    def mul(a, b):
        return (a[0] * b[0] - a[1] * b[1]) >> W, (a[0] * b[1] + a[1] * b[0]) >> W

    def div(a, b):
        den = b[0] * b[0] + b[1] * b[1]
        return ((a[0] * b[0] + a[1] * b[1]) << W) // den, ((a[1] * b[0] - a[0] * b[1]) << W) // den

    S2 = S * S
    for _ in range(max_sweeps):
        done = True
        new = []
        for k in range(n):
            zk = zs[k]
            z2 = zk[0] * zk[0] + zk[1] * zk[1]
            try:
                if z2 > S2:
                    w = div((S, 0), zk)
                    q = dq = (0, 0)
                    for c in cs:  # ascending coefficients = reversed poly in w
                        dw = mul(dq, w)
                        dq = (dw[0] + q[0], dw[1] + q[1])
                        qw = mul(q, w)
                        q = (qw[0] + c[0], qw[1] + c[1])
                    wdq = mul(w, dq)
                    ratio = div(mul(zk, q), (n * q[0] - wdq[0], n * q[1] - wdq[1]))
                else:
                    p = dp = (0, 0)
                    for c in reversed(cs):
                        dz = mul(dp, zk)
                        dp = (dz[0] + p[0], dz[1] + p[1])
                        pz = mul(p, zk)
                        p = (pz[0] + c[0], pz[1] + c[1])
                    ratio = div(p, dp)
                sr = si = 0
                for j in range(n):
                    if j != k:
                        t = div((S, 0), (zk[0] - zs[j][0], zk[1] - zs[j][1]))
                        sr += t[0]
                        si += t[1]
                rs = mul(ratio, (sr, si))
                step = div(ratio, (S - rs[0], -rs[1]))
            except ZeroDivisionError:
                step = (0, 0)
                done = False
            new.append((zk[0] - step[0], zk[1] - step[1]))
            if (step[0] ** 2 + step[1] ** 2) * S2 > T * T * max(S2, z2):
                done = False
        zs = new
        if done:
            break
    return [ctx.mpc(ctx.ldexp(ctx.mpf(a), -W), ctx.ldexp(ctx.mpf(b), -W)) for a, b in zs]


def _residual_ok(ctx, coeffs_mp, z, delta: int, norm) -> bool:
    n = len(coeffs_mp) - 1
    bound_base = ctx.mpf(2) ** (1 - delta) * norm
    for zk in z:
        p = ctx.mpc(0)
        for c in reversed(coeffs_mp):
            p = p * zk + c
        if abs(p) > bound_base * max(1, abs(zk)) ** n:
            return False
    return True


def complex_roots(f_eps: TrigPoly, delta: int, max_bits: int = 1 << 20, seed: int = 0) -> RootSet:
    """All 2d roots of z^d f_eps(z), each within relative 2^-delta, paired.

    The residual contract |g(z_j)| <= 2^(1-delta) ||g|| max(1,|z_j|)^(2d) is
    checked at the working precision, which starts at max(2 delta, 64) bits
    and doubles up to ``max_bits`` (PrecisionExhausted beyond).
    """
    import mpmath

    d = f_eps.degree
    if d == 0:
        return RootSet((), (), delta)
    g = self_inversive_poly(f_eps)
    coeffs_f = np.array([complex(c) for c in g.coeffs])
    rng = np.random.default_rng(seed)
    z_start = [complex(x) for x in _aberth_float(coeffs_f, rng)]

    ctx = mpmath.MPContext()
    work = max(2 * delta, 64)
    sep_bits: Optional[int] = None
    while True:
        if work > max_bits:
            raise PrecisionExhausted(f"root working precision exceeded {max_bits} bits")
        ctx.prec = work
        coeffs_mp = [ctx.mpc(ctx.mpf(c.re.numerator) / c.re.denominator, ctx.mpf(c.im.numerator) / c.im.denominator) for c in g.coeffs]
        norm = ctx.sqrt(ctx.fsum(abs(c) ** 2 for c in coeffs_mp))
        target = delta if sep_bits is None else max(delta, sep_bits)
        z = _polish(ctx, g, [ctx.mpc(x) for x in z_start], target)
        if _residual_ok(ctx, coeffs_mp, z, target, norm):
            # approximations must be distinct at the requested accuracy
            close = _min_gap(ctx, z) <= ctx.mpf(2) ** (-delta + 2)
            if close and sep_bits is None:
                sep_bits = _separation_bits(g)
                log.debug("clustered roots; raising target accuracy to %d bits", sep_bits)
                work = max(work, 2 * sep_bits)
                z_start = z
                continue
            break
        work *= 2
        z_start = z
    bits = delta if sep_bits is None else max(delta, sep_bits)
    roots = tuple(_to_gaussian(ctx, x, bits) for x in z)
    pairing = pair_reciprocal(roots, delta)
    return RootSet(roots, tuple(pairing), delta)


def _min_gap(ctx, z) -> "object":
    best = ctx.inf
    for i in range(len(z)):
        for j in range(i + 1, len(z)):
            gap = abs(z[i] - z[j]) / max(1, abs(z[i]))
            if gap < best:
                best = gap
    return best


def _separation_bits(g: ComplexPoly) -> int:
    m = 1
    for c in g.coeffs:
        m = math.lcm(m, c.re.denominator, c.im.denominator)
    gi = ComplexPoly([c * m for c in g.coeffs])
    sep = separation_lower_bound(gi)
    if sep == 0:
        return 0
    return max(1, math.ceil(math.log2(sep.denominator) - math.log2(max(sep.numerator, 1)))) + 2


def pair_reciprocal(roots: Sequence, delta: int) -> List[Tuple[int, int]]:
    """Greedy matching of each root alpha with the root nearest 1/conj(alpha).

    Pairs are ranked by |alpha conj(beta) - 1| in floating point; the chosen
    pairs are then checked exactly against 2^(-delta/2).  The larger-modulus
    member of each pair comes first.
    """
    gs = [Gaussian.coerce(r) for r in roots]
    n = len(gs)
    if n == 0:
        return []
    if n % 2:
        raise PairingFailed("odd number of roots")
    zc = [complex(r) for r in gs]
    cand = []
    for i in range(n):
        for j in range(i + 1, n):
            cand.append((abs(zc[i] * zc[j].conjugate() - 1), i, j))
    cand.sort()
    used = [False] * n
    pairs = []
    tol2 = Fraction(1, 1 << delta)  # |.|^2 <= 2^-delta  <=>  |.| <= 2^(-delta/2)
    for _, i, j in cand:
        if used[i] or used[j]:
            continue
        err = gs[i] * gs[j].conjugate() - 1
        if err.abs2() > tol2:
            raise PairingFailed(f"roots {i} and {j} are not reciprocal within 2^-{delta}/2")
        used[i] = used[j] = True
        if gs[j].abs2() > gs[i].abs2():
            i, j = j, i
        pairs.append((i, j))
        if len(pairs) * 2 == n:
            break
    if len(pairs) * 2 != n:
        raise PairingFailed("could not pair every root")
    return pairs
