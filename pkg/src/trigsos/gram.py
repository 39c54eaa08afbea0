"""Gram matrices of trigonometric polynomials and the max-min-eigenvalue SDP.

Convention: for Q Hermitian of size d+1 and v = (1, z, ..., z^d),
v* Q v has z^-k coefficient sum_j Q[j+k][j] (the k-th subdiagonal sum).
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .arith import Gaussian, as_fraction, round_fraction
from .errors import Infeasible, SolverStalled
from .factor import LdltFactor, ldlt_exact
from .trigpoly import TrigPoly

__all__ = [
    "HermitianGram",
    "GramSdpProblem",
    "SdpSolution",
    "complex_to_real_embedding",
    "solve_gram_sdp",
    "certified_min_eig_lb",
    "project_gram",
    "gram_residual",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HermitianGram:
    """Hermitian matrix stored by its upper triangle: ``upper[i][j - i]`` is Q[i][j]."""

    n: int
    upper: Tuple[Tuple[Gaussian, ...], ...]

    def __post_init__(self):
        if len(self.upper) != self.n or any(len(r) != self.n - i for i, r in enumerate(self.upper)):
            raise ValueError("upper triangle has the wrong shape")
        for i, r in enumerate(self.upper):
            if r[0].im != 0:
                raise ValueError(f"diagonal entry {i} is not real")

    @classmethod
    def from_full(cls, rows, check: bool = True) -> "HermitianGram":
        rows = [[Gaussian.coerce(x) for x in r] for r in rows]
        n = len(rows)
        if check:
            for i in range(n):
                for j in range(i):
                    if rows[i][j] != rows[j][i].conjugate():
                        raise ValueError("matrix is not Hermitian")
        return cls(n, tuple(tuple(rows[i][i:]) for i in range(n)))

    @classmethod
    def from_numpy(cls, arr) -> "HermitianGram":
        """Exact conversion of a float/complex array, Hermitian part taken."""
        arr = np.asarray(arr, dtype=complex)
        arr = (arr + arr.conj().T) / 2
        n = arr.shape[0]
        rows = []
        for i in range(n):
            row = [Gaussian(Fraction(float(arr[i, i].real)), 0)]
            for j in range(i + 1, n):
                row.append(Gaussian(Fraction(float(arr[i, j].real)), Fraction(float(arr[i, j].imag))))
            rows.append(tuple(row))
        return cls(n, tuple(rows))

    def __getitem__(self, ij) -> Gaussian:
        i, j = ij
        return self.upper[i][j - i] if j >= i else self.upper[j][i - j].conjugate()

    def full(self) -> List[List[Gaussian]]:
        return [[self[i, j] for j in range(self.n)] for i in range(self.n)]

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(self[i, j]) for j in range(self.n)] for i in range(self.n)])

    def shift(self, t) -> "HermitianGram":
        """Q - t I."""
        t = as_fraction(t)
        return HermitianGram(self.n, tuple((r[0] - t,) + r[1:] for r in self.upper))

    def round(self, bits: int) -> "HermitianGram":
        def rnd(g: Gaussian) -> Gaussian:
            return Gaussian(round_fraction(g.re, bits), round_fraction(g.im, bits))

        return HermitianGram(self.n, tuple(tuple(rnd(x) for x in r) for r in self.upper))

    def frobenius2(self) -> Fraction:
        acc = Fraction(0)
        for i, r in enumerate(self.upper):
            acc += r[0].re * r[0].re
            for x in r[1:]:
                acc += 2 * x.abs2()
        return acc

    def diagonal_sum(self, k: int) -> Gaussian:
        """sum_j Q[j+k][j], the z^-k coefficient of v* Q v."""
        acc = Gaussian(0)
        for j in range(self.n - k):
            acc = acc + self[j + k, j]
        return acc

    def to_trigpoly(self) -> TrigPoly:
        if self.n == 0:
            return TrigPoly(0)
        return TrigPoly(self.diagonal_sum(0).re, [self.diagonal_sum(k) for k in range(1, self.n)])

    def max_entry_distance(self, other) -> Fraction:
        """max_ij max(|Re diff|, |Im diff|) against another matrix."""
        rows = other.full() if hasattr(other, "full") else [[Gaussian.coerce(x) for x in r] for r in other]
        best = Fraction(0)
        for i in range(self.n):
            for j in range(self.n):
                diff = self[i, j] - rows[i][j]
                best = max(best, abs(diff.re), abs(diff.im))
        return best


@dataclass(frozen=True)
class GramSdpProblem:
    """maximize lambda s.t. Q - lambda I >= 0 and sum_j Q[j+k][j] = target_k for |k| <= d."""

    target: TrigPoly

    @property
    def n(self) -> int:
        return self.target.degree + 1

    @property
    def constraint_count(self) -> int:
        return 2 * self.target.degree + 1


@dataclass(frozen=True)
class SdpSolution:
    Q_tilde: HermitianGram
    lambda_tilde: Fraction
    residual: Fraction
    within_radius: bool = True
    status: str = "optimal"


def complex_to_real_embedding(H) -> np.ndarray:
    """A + iB -> [[A, -B], [B, A]]."""
    if isinstance(H, HermitianGram):
        H = H.to_numpy()
    H = np.asarray(H, dtype=complex)
    A, B = H.real, H.imag
    return np.block([[A, -B], [B, A]])


def _elementary(n: int, k: int) -> np.ndarray:
    """Ones at (j, j+k): trace(Theta_k Q) = sum_j Q[j+k][j]."""
    return np.eye(n, k=k)


@functools.lru_cache(maxsize=64)
def _numeric_gram(target: TrigPoly):
    """Cached float solve; tightens tolerances as far as cvxopt stays stable."""
    last = None
    # tighter tolerances make cvxopt stall on larger instances without gaining accuracy
    for tol in (1e-9, 1e-8, 1e-7):
        try:
            return _numeric_gram_at(target, tol)
        except (ArithmeticError, ValueError, SolverStalled) as exc:  # includes scaling breakdown
            last = exc
            log.debug("gram sdp tol=%g failed: %r", tol, exc)
    raise SolverStalled(f"Gram SDP failed at every tolerance: {last!r}")


def _numeric_gram_at(target: TrigPoly, tol: float):
    """Float optimum (Q, lambda, status) of the max-min-eigenvalue Gram SDP.

    Solved in cvxopt's dual form: the PSD dual block is the real embedding of
    the Gram part X and the linear dual variable is lambda, with Q = X + lambda I.
    """
    from cvxopt import matrix, solvers

    d = target.degree
    n = d + 1
    rows_b = []
    mats = []
    rows_b.append(float(target.f0))
    mats.append(np.eye(n))
    for k in range(1, d + 1):
        T = _elementary(n, k)
        c = target.coeffs[k - 1]
        mats.append((T + T.T) / 2)  # real part of trace(Theta_k Q)
        rows_b.append(float(c.re))
        mats.append(-1j * (T - T.T) / 2)  # imaginary part
        rows_b.append(float(c.im))
    m = len(mats)
    N = 2 * n
    Gs = np.zeros((N * N, m))
    for j, M in enumerate(mats):
        Gs[:, j] = (complex_to_real_embedding(M) / 2).reshape(-1, order="F")
    Gl = np.zeros((1, m))
    Gl[0, 0] = n  # trace of the identity, the k = 0 constraint
    c = -np.array(rows_b)
    opts = {"show_progress": False, "abstol": tol, "reltol": tol, "feastol": tol, "maxiters": 100}
    sol = solvers.sdp(
        matrix(c), Gl=matrix(Gl), hl=matrix([-1.0]), Gs=[matrix(Gs)], hs=[matrix(np.zeros((N, N)))],
        options=opts,
    )
    status = sol["status"]
    log.debug("gram sdp status=%s gap=%s", status, sol.get("gap"))
    if status in ("primal infeasible", "dual infeasible"):
        raise Infeasible(f"Gram SDP reported {status}")
    if status != "optimal":
        worst = max(abs(sol.get(key) or 0.0) for key in ("gap", "primal infeasibility", "dual infeasibility"))
        if not np.isfinite(worst) or worst > 1e-8:
            raise SolverStalled(f"Gram SDP stopped with status {status}")
    Z = np.array(sol["zs"][0])
    lam = float(sol["zl"][0])
    re = (Z[:n, :n] + Z[n:, n:]) / 2
    im = (Z[n:, :n] - Z[:n, n:]) / 2
    X = re + 1j * im
    Q = X + lam * np.eye(n)
    return Q, lam, status


def project_gram(rows: List[List[Gaussian]], targets: Sequence[Gaussian]) -> List[List[Gaussian]]:
    """Spread each diagonal's residual evenly so that sum_j Q[j+k][j] = targets[k] exactly.

    ``targets[k]`` is the wanted z^-k coefficient (missing entries mean 0).
    The result stays Hermitian; an exactly feasible input is returned unchanged.
    """
    n = len(rows)
    out = [list(r) for r in rows]
    for k in range(n):
        want = Gaussian.coerce(targets[k]) if k < len(targets) else Gaussian(0)
        acc = Gaussian(0)
        for i in range(k, n):
            acc = acc + out[i][i - k]
        r = acc - want
        if not r:
            continue
        corr = r / (n - k)
        for i in range(k, n):
            out[i][i - k] = out[i][i - k] - corr
            if k:
                out[i - k][i] = out[i][i - k].conjugate()
    return out


def gram_residual(Q: HermitianGram, target: TrigPoly) -> Fraction:
    """max over k of the larger of |Re| and |Im| of (sum_j Q[j+k][j] - f_k)."""
    worst = Fraction(0)
    for k in range(Q.n):
        diff = Q.diagonal_sum(k) - target.coeff(k)
        worst = max(worst, abs(diff.re), abs(diff.im))
    for k in range(Q.n, target.degree + 1):
        c = target.coeff(k)
        worst = max(worst, abs(c.re), abs(c.im))
    return worst


def _floor_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction((x.numerator << bits) // x.denominator, 1 << bits)


def certified_min_eig_lb(Q, bits: int = 53) -> Fraction:
    """Rational t with Q - t I provably PSD (exact LDL*), close to lambda_min(Q).

    Starts from the exact Rayleigh quotient of a rounded float eigenvector
    (always >= lambda_min) and backs off by 2^-bits; if that is not provably
    PSD the back-off grows until it is, ending at a Gershgorin bound.
    """
    if not isinstance(Q, HermitianGram):
        Q = HermitianGram.from_full(Q)
    n = Q.n
    if n == 0:
        return Fraction(0)
    w, V = np.linalg.eigh(Q.to_numpy())
    v = V[:, 0]
    scale = max(abs(v)) or 1.0
    vb = [Gaussian(round_fraction(Fraction(float(x.real / scale)), 60), round_fraction(Fraction(float(x.imag / scale)), 60)) for x in v]
    rows = Q.full()
    num = Fraction(0)
    for i in range(n):
        if not vb[i]:
            continue
        acc = Gaussian(0)
        for j in range(n):
            if vb[j]:
                acc = acc + rows[i][j] * vb[j]
        num += (vb[i].conjugate() * acc).re
    den = sum((x.abs2() for x in vb), Fraction(0))
    rho = num / den
    if isinstance(ldlt_exact(Q.shift(rho)), LdltFactor):
        return rho
    gersh = min(
        rows[i][i].re - sum(_abs_upper(rows[i][j]) for j in range(n) if j != i) for i in range(n)
    )
    step = Fraction(1, 1 << bits)
    while True:
        lo = _floor_dyadic(rho - step, bits + 1)
        if lo <= gersh:
            return _floor_dyadic(gersh, bits + 1) if gersh.denominator != 1 else gersh
        if isinstance(ldlt_exact(Q.shift(lo)), LdltFactor):
            return lo
        step *= 256


def _abs_upper(g: Gaussian) -> Fraction:
    """Rational upper bound on |g|."""
    return abs(g.re) + abs(g.im)


def solve_gram_sdp(f_eps: TrigPoly, delta: int, R=None, eig_bits: Optional[int] = None) -> SdpSolution:
    """Gram matrix of f_eps with (near) maximal minimum eigenvalue, rationalized.

    The float optimum is converted exactly, projected exactly onto the trace
    constraints, then rounded to dyadics fine enough that every residual is
    below 2^-delta.  ``R`` (a Frobenius bound) is only checked, never imposed.
    """
    if delta < 1:
        raise ValueError("delta must be >= 1")
    d = f_eps.degree
    if d == 0:
        Q = HermitianGram(1, ((Gaussian(f_eps.f0),),))
        if f_eps.f0 <= 0:
            raise Infeasible("constant polynomial is not positive")
        ok = R is None or f_eps.f0 ** 2 <= as_fraction(R) ** 2
        return SdpSolution(Q, f_eps.f0, Fraction(0), ok)
    Qf, lam, status = _numeric_gram(f_eps)
    exact = HermitianGram.from_numpy(Qf).full()
    targets = [Gaussian(f_eps.f0)] + list(f_eps.coeffs)
    projected = HermitianGram.from_full(project_gram(exact, targets), check=False)
    bits = delta + 4 + (d + 1).bit_length()
    Qt = projected.round(bits)
    residual = gram_residual(Qt, f_eps)
    lam_t = certified_min_eig_lb(Qt, bits=eig_bits or min(delta, 60))
    ok = R is None or Qt.frobenius2() <= as_fraction(R) ** 2
    return SdpSolution(Qt, lam_t, residual, ok, status)
