"""Finite-precision Cholesky and exact LDL* factorizations over Gaussian rationals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

from .arith import Gaussian, as_fraction
from .errors import PivotNonpositive
from .trigpoly import ComplexPoly

__all__ = ["LdltFactor", "Indefinite", "CholeskyFactor", "ldlt_exact", "cholesky_approx", "is_psd"]


def _full(Q) -> List[List[Gaussian]]:
    if hasattr(Q, "full"):
        return Q.full()
    return [[Gaussian.coerce(x) for x in row] for row in Q]


@dataclass(frozen=True)
class LdltFactor:
    """Q[perm[i]][perm[j]] = sum_k L[i][k] * D[k] * conj(L[j][k]) exactly."""

    L: Tuple[Tuple[Gaussian, ...], ...]
    D: Tuple[Fraction, ...]
    perm: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.D)

    def reconstruct(self) -> List[List[Gaussian]]:
        n = self.n
        P = [[Gaussian(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                acc = Gaussian(0)
                for k in range(min(i, j) + 1):
                    if self.D[k]:
                        acc = acc + self.L[i][k] * self.L[j][k].conjugate() * self.D[k]
                P[self.perm[i]][self.perm[j]] = acc
        return P

    def min_pivot(self) -> Fraction:
        return min(self.D) if self.D else Fraction(0)

    def all_positive(self) -> bool:
        return all(x > 0 for x in self.D)


@dataclass(frozen=True)
class Indefinite:
    """Returned by ldlt_exact when the matrix is not positive semidefinite."""

    step: int
    reason: str

    def __bool__(self):
        return False


def _scaled_gauss_ints(rows: List[List[Gaussian]]):
    m = 1
    for row in rows:
        for x in row:
            m = math.lcm(m, x.re.denominator, x.im.denominator)
    re = [[(x.re * m).numerator for x in row] for row in rows]
    im = [[(x.im * m).numerator for x in row] for row in rows]
    return m, re, im


def ldlt_exact(Q):
    """Exact LDL* with symmetric diagonal pivoting (largest remaining diagonal).

    Fraction-free elimination on the integer-scaled matrix keeps every
    intermediate a Gaussian integer.  Returns :class:`LdltFactor` for PSD
    input and :class:`Indefinite` otherwise.
    """
    rows = _full(Q)
    n = len(rows)
    for i in range(n):
        if len(rows[i]) != n:
            raise ValueError("matrix must be square")
        if rows[i][i].im != 0:
            return Indefinite(i, "non-real diagonal entry")
        for j in range(i):
            if rows[i][j] != rows[j][i].conjugate():
                raise ValueError("matrix is not Hermitian")
    if n == 0:
        return LdltFactor((), (), ())
    M, ar, ai = _scaled_gauss_ints(rows)
    perm = list(range(n))
    L_re = [[0] * n for _ in range(n)]  # numerators over the pivot of each column
    L_im = [[0] * n for _ in range(n)]
    pivots: List[int] = []
    p_prev = 1
    k = 0
    while k < n:
        best = max(range(k, n), key=lambda r: ar[r][r])
        if ar[best][best] < 0:
            return Indefinite(k, "negative pivot")
        if best != k:
            for mat in (ar, ai):
                mat[k], mat[best] = mat[best], mat[k]
                for row in mat:
                    row[k], row[best] = row[best], row[k]
            for mat in (L_re, L_im):
                mat[k], mat[best] = mat[best], mat[k]
            perm[k], perm[best] = perm[best], perm[k]
        p = ar[k][k]
        if p == 0:
            for r in range(k, n):
                for s in range(k, n):
                    if ar[r][s] or ai[r][s]:
                        return Indefinite(k, "zero pivot with nonzero remainder")
            pivots.extend([0] * (n - k))
            break
        for r in range(k + 1, n):
            L_re[r][k] = ar[r][k]
            L_im[r][k] = ai[r][k]
        for r in range(k + 1, n):
            xr, xi = ar[r][k], ai[r][k]
            row_r, row_i = ar[r], ai[r]
            for s in range(k + 1, r + 1):
                # a_ks = conj(a_sk)
                yr, yi = ar[s][k], -ai[s][k]
                nr = p * row_r[s] - (xr * yr - xi * yi)
                ni = p * row_i[s] - (xr * yi + xi * yr)
                row_r[s] = nr // p_prev
                row_i[s] = ni // p_prev
                if s != r:
                    ar[s][r] = row_r[s]
                    ai[s][r] = -row_i[s]
        pivots.append(p)
        p_prev = p
        k += 1
    D = []
    prev = 1
    for p in pivots:
        if p == 0:
            D.append(Fraction(0))
        else:
            D.append(Fraction(p, prev * M))
            prev = p
    L = []
    for i in range(n):
        row = []
        for j in range(n):
            if j == i:
                row.append(Gaussian(1))
            elif j < i and pivots[j] != 0:
                row.append(Gaussian(Fraction(L_re[i][j], pivots[j]), Fraction(L_im[i][j], pivots[j])))
            else:
                row.append(Gaussian(0))
        L.append(tuple(row))
    return LdltFactor(tuple(L), tuple(D), tuple(perm))


def is_psd(Q) -> bool:
    return isinstance(ldlt_exact(Q), LdltFactor)


@dataclass(frozen=True)
class CholeskyFactor:
    """L = l / 2^delta_c with l a lower-triangular Gaussian-integer matrix."""

    l_re: Tuple[Tuple[int, ...], ...]
    l_im: Tuple[Tuple[int, ...], ...]
    delta_c: int

    def entry(self, i: int, j: int) -> Gaussian:
        s = 1 << self.delta_c
        return Gaussian(Fraction(self.l_re[i][j], s), Fraction(self.l_im[i][j], s))

    def squares(self) -> List[ComplexPoly]:
        """s_k(z) = sum_j conj(L[j][k]) z^j, so that sum_k s_k s_k* = v* L L* v."""
        n = len(self.l_re)
        s = 1 << self.delta_c
        out = []
        for k in range(n):
            out.append(ComplexPoly([
                Gaussian(Fraction(self.l_re[j][k], s), Fraction(-self.l_im[j][k], s)) for j in range(n)
            ]))
        return out


def _round_half_even(num: int, den: int) -> int:
    q, r = divmod(num, den)
    if 2 * r > den or (2 * r == den and q % 2):
        q += 1
    return q


def cholesky_factor(Q, delta_c: int) -> CholeskyFactor:
    rows = _full(Q)
    n = len(rows)
    S2 = 1 << (2 * delta_c)
    M, qr, qi = _scaled_gauss_ints(rows)
    # targets are (Q * S^2) = (q / M) * S^2; keep them as (num, M)
    lr = [[0] * n for _ in range(n)]
    li = [[0] * n for _ in range(n)]
    for j in range(n):
        acc = qr[j][j] * S2 - M * sum(lr[j][k] ** 2 + li[j][k] ** 2 for k in range(j))
        if acc <= 0:
            raise PivotNonpositive(f"pivot {j} is not positive at delta_c = {delta_c}")
        ljj = math.isqrt(acc // M)
        if ljj == 0:
            raise PivotNonpositive(f"pivot {j} rounds to zero at delta_c = {delta_c}")
        lr[j][j] = ljj
        for i in range(j + 1, n):
            # Q_ij S^2 - sum_k l_ik conj(l_jk)
            sr = si = 0
            for k in range(j):
                a, b, c, d = lr[i][k], li[i][k], lr[j][k], li[j][k]
                sr += a * c + b * d
                si += b * c - a * d
            num_r = qr[i][j] * S2 - M * sr
            num_i = qi[i][j] * S2 - M * si
            lr[i][j] = _round_half_even(num_r, M * ljj)
            li[i][j] = _round_half_even(num_i, M * ljj)
    return CholeskyFactor(tuple(map(tuple, lr)), tuple(map(tuple, li)), delta_c)


def cholesky_approx(Q, lambda_lb, delta_c: int) -> List[ComplexPoly]:
    """Dyadic Cholesky factor at delta_c bits, returned as the squares s_0..s_d.

    Square roots are rounded toward zero; off-diagonal quotients to nearest.
    Raises PivotNonpositive when a pivot is not strictly positive.
    """
    lam = as_fraction(lambda_lb)
    if lam <= 0:
        raise PivotNonpositive("minimum eigenvalue bound must be positive")
    return cholesky_factor(Q, delta_c).squares()
