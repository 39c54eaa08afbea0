"""Certified linear-phase FIR filter design.

The zero-phase response H(w) = h0 + 2 sum_k h_k cos(k w) is constrained by
four nonnegativity conditions, each written as a Gram identity:

    (1+gp) - H          = v* Q1 v                             on the circle
    H - (1-gp)          = v* Q2 v + (x-1)(cos wp - x) v* Q3 v  x = cos w
    gs - H              = v* Q4 v + (x-cos ws)(-1-x) v* Q5 v
    gs + H              = v* Q6 v + (x-cos ws)(-1-x) v* Q7 v

and the stopband energy h^T Ct h is minimized.  Trigonometric constants are
replaced by dyadic rationals at ``spec_bits``; the certificate is exact for
that rationalized problem.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .arith import (
    DyadicInterval,
    Gaussian,
    as_fraction,
    fraction_from_str,
    fraction_to_str,
    mpf_to_fraction,
    round_fraction,
)
from .errors import Infeasible, ProjectionBrokePsd, SolverStalled, SpecError
from .factor import Indefinite, LdltFactor, ldlt_exact

__all__ = [
    "FilterSpec",
    "FilterSdpData",
    "FilterNumeric",
    "FilterCertificate",
    "build_filter_sdp",
    "solve_filter_sdp",
    "project_filter_certificate",
    "check_filter_certificate",
    "design_filter",
    "filter_report",
    "filter_certificate_to_json",
    "filter_certificate_from_json",
    "energy_enclosure",
    "family_residuals",
    "FAMILIES",
]

log = logging.getLogger(__name__)

Matrix = Tuple[Tuple[Fraction, ...], ...]
Q7_SHIFT = Fraction(1, 10**9)
NAMES = ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7")


@dataclass(frozen=True)
class FilterSpec:
    """Angles omega_p, omega_s are rational multiples of pi (omega = omega_p * pi)."""

    d: int
    omega_p: Fraction
    omega_s: Fraction
    gamma_p: Fraction
    gamma_s: Fraction
    spec_bits: int = 128

    def __post_init__(self):
        for name in ("omega_p", "omega_s", "gamma_p", "gamma_s"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.d < 1:
            raise SpecError("filter order d must be >= 1")
        if not 0 < self.omega_p < self.omega_s < 1:
            raise SpecError("need 0 < omega_p < omega_s < pi")
        if self.gamma_p <= 0 or self.gamma_s <= 0:
            raise SpecError("ripple bounds must be positive")
        if self.spec_bits < 8:
            raise SpecError("spec_bits must be >= 8")

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "omega_p": fraction_to_str(self.omega_p),
            "omega_s": fraction_to_str(self.omega_s),
            "gamma_p": fraction_to_str(self.gamma_p),
            "gamma_s": fraction_to_str(self.gamma_s),
            "spec_bits": self.spec_bits,
        }

    @classmethod
    def from_json(cls, data) -> "FilterSpec":
        return cls(
            int(data["d"]),
            fraction_from_str(data["omega_p"]),
            fraction_from_str(data["omega_s"]),
            fraction_from_str(data["gamma_p"]),
            fraction_from_str(data["gamma_s"]),
            int(data.get("spec_bits", 128)),
        )


# ------------------------------------------------------------ rationalization

def _rationalize(value, bits: int) -> DyadicInterval:
    """Nearest multiple of 2^-bits to an mpmath value computed with 32 guard bits.

    The radius 2^-bits covers the rounding (2^-(bits+1)) and the evaluation error.
    """
    return DyadicInterval(round_fraction(mpf_to_fraction(value), bits), Fraction(1, 1 << bits))


def _cos_pi(r: Fraction, bits: int) -> DyadicInterval:
    import mpmath

    if (2 * r).denominator == 1:  # cos of a multiple of pi/2 is exact
        return DyadicInterval(Fraction([1, 0, -1, 0][int(2 * r) % 4]), Fraction(0))
    ctx = mpmath.MPContext()
    ctx.prec = bits + 32
    return _rationalize(ctx.cospi(ctx.mpf(r.numerator) / r.denominator), bits)


def _toeplitz_entry(k: int, omega_s: Fraction, bits: int) -> DyadicInterval:
    """c_0 = 1 - omega_s/pi, c_k = -sin(k omega_s)/(k pi)."""
    import mpmath

    if k == 0:
        return DyadicInterval(1 - omega_s, Fraction(0))
    if (k * omega_s).denominator == 1:
        return DyadicInterval(Fraction(0), Fraction(0))
    ctx = mpmath.MPContext()
    ctx.prec = bits + 32
    r = k * omega_s
    return _rationalize(-ctx.sinpi(ctx.mpf(r.numerator) / r.denominator) / (k * ctx.pi), bits)


@dataclass(frozen=True)
class Family:
    """const_k + sign * h_k = trace(Theta_k A) + M_k(B), with band (a, b) for B."""

    name: str
    A: int
    B: Optional[int]
    sign: int


FAMILIES = (
    Family("passband upper", 0, None, -1),
    Family("passband lower", 1, 2, +1),
    Family("stopband upper", 3, 4, -1),
    Family("stopband lower", 5, 6, +1),
)


@dataclass(frozen=True)
class FilterSdpData:
    spec: FilterSpec
    cos_p: DyadicInterval
    cos_s: DyadicInterval
    c: Tuple[DyadicInterval, ...]  # c_0 .. c_2d
    C_tilde: Matrix  # P^T C P from the midpoints
    C_tilde_rad: Matrix  # entrywise enclosure radius

    @property
    def d(self) -> int:
        return self.spec.d

    def sizes(self) -> Tuple[int, ...]:
        n, m = self.d + 1, self.d - 1
        return (n, n, m, n, m, n, m)

    def band(self, fam: Family) -> Tuple[Fraction, Fraction]:
        if fam.B is None:
            return (Fraction(0), Fraction(0))
        if fam.A == 1:
            return (Fraction(1), self.cos_p.center)
        return (self.cos_s.center, Fraction(-1))

    def const(self, fam: Family, k: int) -> Fraction:
        if k:
            return Fraction(0)
        sp = self.spec
        return {0: 1 + sp.gamma_p, 1: -(1 - sp.gamma_p), 3: sp.gamma_s, 5: sp.gamma_s}[fam.A]


def _embedding(d: int) -> List[List[int]]:
    """P = [[0, J_d], [1, 0], [0, I_d]] of shape (2d+1) x (d+1): g = P h is the impulse response."""
    P = [[0] * (d + 1) for _ in range(2 * d + 1)]
    for i in range(d):
        P[i][d - i] = 1
        P[d + 1 + i][1 + i] = 1
    P[d][0] = 1
    return P


def build_filter_sdp(spec: FilterSpec) -> FilterSdpData:
    d, bits = spec.d, spec.spec_bits
    c = tuple(_toeplitz_entry(k, spec.omega_s, bits) for k in range(2 * d + 1))
    P = _embedding(d)
    # column j of P has ones at rows d-j and d+j (one row for j = 0)
    rows = [sorted({d - j, d + j}) for j in range(d + 1)]
    Ct, Cr = [], []
    for i in range(d + 1):
        mid_row, rad_row = [], []
        for j in range(d + 1):
            mid = rad = Fraction(0)
            for a in rows[i]:
                for b in rows[j]:
                    mid += c[abs(a - b)].center
                    rad += c[abs(a - b)].radius
            mid_row.append(mid)
            rad_row.append(rad)
        Ct.append(tuple(mid_row))
        Cr.append(tuple(rad_row))
    assert all(P[r][j] for j in range(d + 1) for r in rows[j])
    return FilterSdpData(
        spec, _cos_pi(spec.omega_p, bits), _cos_pi(spec.omega_s, bits), c, tuple(Ct), tuple(Cr)
    )


# --------------------------------------------------------- trace operators

def _diag_sum(Q: Sequence[Sequence], k: int):
    """trace(Theta_k Q) = sum_i Q[i+|k|][i]; zero once |k| is out of range."""
    k = abs(k)
    n = len(Q)
    if k >= n:
        return Fraction(0)
    return sum((Q[i + k][i] for i in range(n - k)), Fraction(0))


def _band_term(B: Sequence[Sequence], k: int, a, b):
    """z^-k coefficient of (x - a)(b - x) v* B v with x = (z + 1/z)/2."""
    if not B:
        return Fraction(0)
    s = lambda j: _diag_sum(B, j)  # noqa: E731
    return (a + b) / 2 * (s(k - 1) + s(k + 1)) - (a * b + Fraction(1, 2)) * s(k) - (s(k - 2) + s(k + 2)) * Fraction(1, 4)


def family_residuals(data: FilterSdpData, fam: Family, h: Sequence[Fraction], Qs: Sequence[Matrix]) -> List[Fraction]:
    """lhs_k - rhs_k for k = 0..d (all zero iff the identity holds)."""
    a, b = data.band(fam)
    B = Qs[fam.B] if fam.B is not None else ()
    out = []
    for k in range(data.d + 1):
        lhs = data.const(fam, k) + fam.sign * h[k]
        rhs = _diag_sum(Qs[fam.A], k) + _band_term(B, k, a, b)
        out.append(lhs - rhs)
    return out


# ------------------------------------------------------------ numerical SDP

@dataclass
class FilterNumeric:
    h: np.ndarray
    Qs: List[np.ndarray]
    energy: float
    status: str


def _theta(n: int, k: int) -> np.ndarray:
    return np.eye(n, k=k) if abs(k) < n else np.zeros((n, n))


def _band_matrix(n: int, k: int, a: float, b: float) -> np.ndarray:
    return (
        (a + b) / 2 * (_theta(n, k - 1) + _theta(n, k + 1))
        - (a * b + 0.5) * _theta(n, k)
        - 0.25 * (_theta(n, k - 2) + _theta(n, k + 2))
    )


def solve_filter_sdp(data: FilterSdpData, margin: float = 1e-8, solver: str = "CLARABEL") -> FilterNumeric:
    """Minimize h^T Ct h through the epigraph [[t, (Lc h)^T], [Lc h, I]] >= 0.

    Every Gram variable is kept ``margin`` inside the PSD cone (Q7 inside
    10^-9 I + margin) so that rounding and projection stay PSD.
    """
    import cvxpy as cp

    d = data.d
    sizes = data.sizes()
    Ct = np.array([[float(x) for x in row] for row in data.C_tilde])
    w, V = np.linalg.eigh(Ct)
    Lc = np.diag(np.sqrt(np.clip(w, 0, None))) @ V.T

    h = cp.Variable(d + 1)
    t = cp.Variable()
    X = cp.Variable((d + 2, d + 2), PSD=True)
    Qs = [cp.Variable((n, n), PSD=True) if n else None for n in sizes]
    cons = [X[0, 0] == t, X[1:, 0] == Lc @ h, X[1:, 1:] == np.eye(d + 1)]
    for i, Q in enumerate(Qs):
        if Q is not None:
            shift = margin + (float(Q7_SHIFT) if i == 6 else 0.0)
            cons.append(Q - shift * np.eye(sizes[i]) >> 0)
    for fam in FAMILIES:
        a, b = (float(x) for x in data.band(fam))
        for k in range(d + 1):
            lhs = float(data.const(fam, k)) + fam.sign * h[k]
            rhs = cp.trace(_theta(d + 1, k) @ Qs[fam.A])
            if fam.B is not None and Qs[fam.B] is not None:
                rhs = rhs + cp.trace(_band_matrix(sizes[fam.B], k, a, b) @ Qs[fam.B])
            cons.append(lhs == rhs)
    prob = cp.Problem(cp.Minimize(t), cons)
    try:
        prob.solve(solver=solver)
    except cp.error.SolverError as exc:
        raise SolverStalled(f"filter SDP solver failed: {exc}") from exc
    status = prob.status
    if status in ("infeasible", "infeasible_inaccurate", "unbounded", "unbounded_inaccurate"):
        raise Infeasible(f"filter SDP is {status}")
    if status not in ("optimal", "optimal_inaccurate") or h.value is None:
        raise SolverStalled(f"filter SDP ended with status {status}")
    hv = np.asarray(h.value, dtype=float)
    Qv = [np.asarray(Q.value, dtype=float) if Q is not None else np.zeros((0, 0)) for Q in Qs]
    return FilterNumeric(hv, Qv, float(hv @ Ct @ hv), status)


# -------------------------------------------------------------- certificate

@dataclass(frozen=True)
class FilterCertificate:
    spec: FilterSpec
    h: Tuple[Fraction, ...]
    Qs: Tuple[Matrix, ...]
    energy: DyadicInterval
    ldlt_witnesses: Tuple[LdltFactor, ...]
    meta: Dict[str, object] = field(default_factory=dict, compare=False)


def _round_sym(M: np.ndarray, bits: int) -> List[List[Fraction]]:
    n = M.shape[0]
    out = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            v = round_fraction(Fraction(float((M[i, j] + M[j, i]) / 2)), bits)
            out[i][j] = out[j][i] = v
    return out


def _project_real(Q: List[List[Fraction]], targets: Sequence[Fraction]) -> List[List[Fraction]]:
    """Spread each diagonal's residual evenly; the real symmetric case of the Gram projection."""
    n = len(Q)
    out = [list(r) for r in Q]
    for k in range(n):
        r = sum((out[i][i - k] for i in range(k, n)), Fraction(0)) - targets[k]
        if not r:
            continue
        corr = r / (n - k)
        for i in range(k, n):
            out[i][i - k] -= corr
            if k:
                out[i - k][i] = out[i][i - k]
    return out


def _shifted(Q: Sequence[Sequence[Fraction]], t: Fraction) -> List[List[Fraction]]:
    return [[x - t if i == j else x for j, x in enumerate(row)] for i, row in enumerate(Q)]


def energy_enclosure(data: FilterSdpData, h: Sequence[Fraction]) -> DyadicInterval:
    """h^T Ct h for the exact midpoint matrix, widened by the Toeplitz enclosure radii."""
    n = len(h)
    center = Fraction(0)
    rad = Fraction(0)
    for i in range(n):
        for j in range(n):
            center += h[i] * data.C_tilde[i][j] * h[j]
            rad += abs(h[i] * h[j]) * data.C_tilde_rad[i][j]
    return DyadicInterval(center, rad)


def project_filter_certificate(data: FilterSdpData, num: FilterNumeric, bits: int = 40) -> FilterCertificate:
    """Round h and the seven Gram matrices, freeze Q3/Q5/Q7, project Q1/Q2/Q4/Q6, factor exactly."""
    d = data.d
    h = tuple(round_fraction(Fraction(float(x)), bits) for x in num.h)
    Qs = [_round_sym(M, bits) for M in num.Qs]
    for fam in FAMILIES:
        a, b = data.band(fam)
        B = Qs[fam.B] if fam.B is not None else []
        targets = [data.const(fam, k) + fam.sign * h[k] - _band_term(B, k, a, b) for k in range(d + 1)]
        Qs[fam.A] = _project_real(Qs[fam.A], targets)
    witnesses = []
    for i, Q in enumerate(Qs):
        M = _shifted(Q, Q7_SHIFT) if i == 6 else Q
        fac = ldlt_exact(M)
        if isinstance(fac, Indefinite):
            raise ProjectionBrokePsd(f"{NAMES[i]} is not PSD after projection ({fac.reason} at step {fac.step})")
        witnesses.append(fac)
    frozen = tuple(tuple(tuple(r) for r in Q) for Q in Qs)
    return FilterCertificate(
        data.spec, h, frozen, energy_enclosure(data, h), tuple(witnesses),
        meta={"round_bits": bits, "numeric_energy": num.energy},
    )


def check_filter_certificate(data: FilterSdpData, cert: FilterCertificate) -> List[Tuple[str, bool]]:
    """Independent exact recheck: one (label, ok) per constraint family, witness and the energy."""
    checks = []
    Qs = [[list(r) for r in Q] for Q in cert.Qs]
    for fam in FAMILIES:
        ok = len(cert.h) == data.d + 1 and not any(family_residuals(data, fam, cert.h, Qs))
        checks.append((f"identity {fam.name}", ok))
    for i, (Q, fac) in enumerate(zip(Qs, cert.ldlt_witnesses)):
        M = _shifted(Q, Q7_SHIFT) if i == 6 else Q
        target = [[Gaussian(x) for x in row] for row in M]
        ok = isinstance(fac, LdltFactor) and all(p >= 0 for p in fac.D) and fac.reconstruct() == target
        checks.append((f"PSD witness {NAMES[i]}" + (" - 1e-9 I" if i == 6 else ""), ok))
    checks.append(("energy enclosure", energy_enclosure(data, cert.h) == cert.energy))
    return checks


def design_filter(
    spec: FilterSpec,
    margin: float = 1e-10,
    bits: int = 40,
    max_retries: int = 4,
    solver: str = "CLARABEL",
) -> Tuple[FilterCertificate, FilterSdpData]:
    """Full pipeline; on a broken projection re-solve with a 10x larger margin and 8 more bits."""
    data = build_filter_sdp(spec)
    last: Optional[Exception] = None
    for attempt in range(max_retries + 1):
        num = solve_filter_sdp(data, margin=margin, solver=solver)
        try:
            cert = project_filter_certificate(data, num, bits=min(bits, 52))
            cert.meta["margin"] = margin
            return cert, data
        except ProjectionBrokePsd as exc:
            log.info("attempt %d: %s", attempt, exc)
            last = exc
            margin *= 10
            bits += 8
    raise ProjectionBrokePsd(f"projection failed after {max_retries} retries: {last}")


# ------------------------------------------------------------------ output

def _matrix_json(M) -> List[List[str]]:
    return [[fraction_to_str(x) for x in row] for row in M]


def _ldlt_json(fac: LdltFactor) -> dict:
    n = fac.n
    return {
        "D": [fraction_to_str(x) for x in fac.D],
        "perm": list(fac.perm),
        # strictly lower part only; real for these matrices
        "L": [[fraction_to_str(fac.L[i][j].re) for j in range(i)] for i in range(n)],
    }


def _ldlt_from_json(data) -> LdltFactor:
    n = len(data["D"])
    L = []
    for i in range(n):
        row = [Gaussian(fraction_from_str(x)) for x in data["L"][i]] + [Gaussian(1)] + [Gaussian(0)] * (n - i - 1)
        L.append(tuple(row))
    return LdltFactor(tuple(L), tuple(fraction_from_str(x) for x in data["D"]), tuple(data["perm"]))


def filter_certificate_to_json(cert: FilterCertificate) -> dict:
    return {
        "spec": cert.spec.to_json(),
        "h": [fraction_to_str(x) for x in cert.h],
        "Q": [_matrix_json(Q) for Q in cert.Qs],
        "energy": {"center": fraction_to_str(cert.energy.center), "radius": fraction_to_str(cert.energy.radius)},
        "ldlt_witnesses": [_ldlt_json(f) for f in cert.ldlt_witnesses],
        "meta": dict(cert.meta),
    }


def filter_certificate_from_json(data) -> FilterCertificate:
    return FilterCertificate(
        FilterSpec.from_json(data["spec"]),
        tuple(fraction_from_str(x) for x in data["h"]),
        tuple(tuple(tuple(fraction_from_str(x) for x in row) for row in Q) for Q in data["Q"]),
        DyadicInterval(fraction_from_str(data["energy"]["center"]), fraction_from_str(data["energy"]["radius"])),
        tuple(_ldlt_from_json(w) for w in data["ldlt_witnesses"]),
        meta=dict(data.get("meta") or {}),
    )


def filter_report(cert: FilterCertificate, checks: Sequence[Tuple[str, bool]]) -> str:
    sp = cert.spec
    lines = [
        f"FIR filter, order d = {sp.d}",
        f"passband [0, {sp.omega_p} pi], ripple {sp.gamma_p}; stopband [{sp.omega_s} pi, pi], ripple {sp.gamma_s}",
        f"trigonometric data rationalized at {sp.spec_bits} bits",
        "",
        "coefficients h_k:",
    ]
    lines += [f"  h[{k}] = {float(x):+.12e}" for k, x in enumerate(cert.h)]
    e = cert.energy
    lines += [
        "",
        f"certified energy of the designed feasible filter: {float(e.center):.9e}",
        f"  enclosure [{float(e.lo):.12e}, {float(e.hi):.12e}], width {float(e.width):.3e}",
        "",
        "exact checks:",
    ]
    lines += [f"  {'ok  ' if ok else 'FAIL'} {label}" for label, ok in checks]
    return "\n".join(lines) + "\n"


def dumps(cert: FilterCertificate) -> str:
    return json.dumps(filter_certificate_to_json(cert), indent=1)
