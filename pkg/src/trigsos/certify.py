"""The three certification algorithms, the certificate model and the exact verifier.

* csos1: perturb by eps, take approximate roots of f - eps, compensate.
* csos2: perturb by eps, approximate Gram matrix + dyadic Cholesky, compensate.
* csos3: approximate Gram matrix of f itself, round, project exactly, exact LDL*.

Every certificate reduces to an exact polynomial identity plus (for the first
two kinds) the sign of eps + u0 - 2 sum |u_k|, decided without radicals.
"""

from __future__ import annotations

import json
import logging
import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import (
    Gaussian,
    Sign,
    as_fraction,
    fraction_from_str,
    fraction_to_str,
    gaussian_from_json,
    gaussian_to_json,
    round_dyadic,
    sign_of_root_sum,
)
from .circle import find_epsilon
from .errors import PairingFailed, PivotNonpositive, PrecisionExhausted
from .factor import LdltFactor, cholesky_factor, ldlt_exact
from .gram import project_gram, solve_gram_sdp, _numeric_gram
from .roots import complex_roots
from .trigpoly import ComplexPoly, TrigPoly, mul_star, mul_star_ints

__all__ = [
    "SohsCertificate",
    "PrecisionState",
    "Diagnostics",
    "Verdict",
    "csos1",
    "csos2",
    "csos3",
    "verify",
    "certificate_to_json",
    "certificate_from_json",
    "KINDS",
    "ALGORITHMS",
]

log = logging.getLogger(__name__)

KINDS = ("roots", "sdp-compensated", "projected")
DEFAULT_MAX_BITS = 1 << 20


@dataclass(frozen=True)
class PrecisionState:
    delta: int = 1
    R: Fraction = Fraction(1)
    delta_c: int = 1
    delta_hat: int = 1

    def __post_init__(self):
        object.__setattr__(self, "R", as_fraction(self.R))
        if min(self.delta, self.delta_c, self.delta_hat) < 1 or self.R < 1:
            raise ValueError("precision parameters must be >= 1")

    def doubled(self) -> "PrecisionState":
        return PrecisionState(2 * self.delta, 2 * self.R, 2 * self.delta_c, 2 * self.delta_hat)


@dataclass
class Diagnostics:
    """Timers (seconds) and the sequence of precision states tried."""

    t_epsilon: float = 0.0
    t_u: float = 0.0
    t_total: float = 0.0
    history: List[PrecisionState] = field(default_factory=list)
    events: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class SohsCertificate:
    kind: str
    epsilon: Optional[Fraction] = None
    a: Optional[Fraction] = None
    u0: Optional[Fraction] = None
    u: Tuple[Gaussian, ...] = ()
    alphas: Tuple[Gaussian, ...] = ()
    squares: Tuple[ComplexPoly, ...] = ()
    weights: Tuple[Fraction, ...] = ()
    meta: Dict[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: Optional[str] = None

    def __bool__(self):
        return self.accepted

    def __str__(self):
        return "accept" if self.accepted else f"reject({self.reason})"


ACCEPT = Verdict(True)


# ------------------------------------------------------------------ helpers

def _sum_trig(polys: Sequence[TrigPoly]) -> TrigPoly:
    acc = TrigPoly(0)
    for p in polys:
        acc = acc + p
    return acc


def _compensation_sign(eps: Fraction, u0: Fraction, u: Sequence[Gaussian], max_bits: int) -> Sign:
    """Sign of eps + u0 - 2 sum |u_k|, with |u_k| entering only through 4|u_k|^2."""
    return sign_of_root_sum(eps + u0, [4 * c.abs2() for c in u if c], max_bits=max_bits)


def _product_poly(alphas: Sequence[Gaussian]) -> ComplexPoly:
    """prod (z - alpha_k), computed on the common-denominator integer scaling."""
    if not alphas:
        return ComplexPoly((Gaussian(1),))
    m = 1
    for a in alphas:
        m = math.lcm(m, a.re.denominator, a.im.denominator)
    re, im = [1], [0]
    for a in alphas:
        ar, ai = (a.re * m).numerator, (a.im * m).numerator
        # multiply by (m z - (ar + i ai))
        nre = [0] * (len(re) + 1)
        nim = [0] * (len(im) + 1)
        for j in range(len(re)):
            nre[j + 1] += m * re[j]
            nim[j + 1] += m * im[j]
            nre[j] -= ar * re[j] - ai * im[j]
            nim[j] -= ar * im[j] + ai * re[j]
        re, im = nre, nim
    scale = m ** len(alphas)
    return ComplexPoly([Gaussian(Fraction(r, scale), Fraction(i, scale)) for r, i in zip(re, im)])


def _roots_F(alphas: Sequence[Gaussian]) -> TrigPoly:
    """F = prod (z - alpha_k)(z^-1 - conj(alpha_k)) = G G*."""
    return mul_star(_product_poly(alphas))


# -------------------------------------------------------------------- csos1

def csos1(
    f: TrigPoly,
    delta: int = 1,
    root_bits: Optional[int] = None,
    max_bits: int = DEFAULT_MAX_BITS,
    seed: int = 0,
    diag: Optional[Diagnostics] = None,
) -> SohsCertificate:
    """Root-isolation certificate f = eps + u + a * prod (z - alpha)(z^-1 - conj alpha).

    ``delta`` is the starting root accuracy; ``root_bits`` (default: delta)
    is the number of fractional bits kept for each alpha.  Both double on a
    failed stopping test.
    """
    diag = diag if diag is not None else Diagnostics()
    t0 = time.perf_counter()
    eps = find_epsilon(f)
    diag.t_epsilon = time.perf_counter() - t0
    t1 = time.perf_counter()
    fe = f - eps
    d = f.degree
    rb = root_bits if root_bits is not None else delta
    while True:
        if delta > max_bits:
            raise PrecisionExhausted(f"csos1 exceeded {max_bits} bits")
        diag.history.append(PrecisionState(delta=delta))
        try:
            rs = complex_roots(fe, delta, max_bits=max_bits, seed=seed)
        except PairingFailed as exc:
            diag.events.append(f"delta={delta}: {exc}")
            delta, rb = 2 * delta, 2 * rb
            continue
        alphas = tuple(round_dyadic(r, rb) for r in rs.primaries)
        F = _roots_F(alphas)
        a = (f.f0 - eps) / F.f0
        u_poly = fe - F.scale(a)
        u0 = u_poly.f0
        u = tuple(u_poly.coeff(k) for k in range(1, d + 1))
        sign = _compensation_sign(eps, u0, u, max_bits)
        if a > 0 and sign is Sign.POSITIVE:
            break
        diag.events.append(f"delta={delta}: stopping test {sign.value}")
        delta, rb = 2 * delta, 2 * rb
    diag.t_u = time.perf_counter() - t1
    diag.t_total = time.perf_counter() - t0
    return SohsCertificate(
        "roots", epsilon=eps, a=a, u0=u0, u=u, alphas=alphas,
        meta={"delta": delta, "root_bits": rb},
    )


# -------------------------------------------------------------------- csos2

def _frobenius_estimate(target: TrigPoly) -> float:
    import numpy as np

    Q, _, _ = _numeric_gram(target)
    return float(np.linalg.norm(Q))


def _gram_solution(target: TrigPoly, state: PrecisionState):
    """solve_gram_sdp, skipping the exact work when the float iterate is clearly outside R."""
    if target.degree > 0 and _frobenius_estimate(target) > float(state.R) * (1 + 1e-9):
        return None
    sol = solve_gram_sdp(target, state.delta, state.R)
    if not sol.within_radius:
        return None
    return sol


def csos2(
    f: TrigPoly,
    start: Optional[PrecisionState] = None,
    max_bits: int = DEFAULT_MAX_BITS,
    diag: Optional[Diagnostics] = None,
) -> SohsCertificate:
    """SDP certificate f = eps + u + sum s_k s_k* with a dyadic Cholesky factor."""
    diag = diag if diag is not None else Diagnostics()
    state = start or PrecisionState()
    t0 = time.perf_counter()
    eps = find_epsilon(f)
    diag.t_epsilon = time.perf_counter() - t0
    t1 = time.perf_counter()
    fe = f - eps
    d = f.degree
    while True:
        if state.delta > max_bits or state.delta_c > max_bits:
            raise PrecisionExhausted(f"csos2 exceeded {max_bits} bits")
        diag.history.append(state)
        sol = _gram_solution(fe, state)
        reason = None
        if sol is None:
            reason = "Gram iterate outside radius R"
        elif sol.lambda_tilde <= 0:
            reason = "nonpositive eigenvalue bound"
        else:
            try:
                chol = cholesky_factor(sol.Q_tilde, state.delta_c)
            except PivotNonpositive as exc:
                reason = str(exc)
        if reason is None:
            sum_ss = _cholesky_sum(chol)
            u_poly = fe - sum_ss
            u0 = u_poly.f0
            u = tuple(u_poly.coeff(k) for k in range(1, d + 1))
            sign = _compensation_sign(eps, u0, u, max_bits)
            if sign is Sign.POSITIVE:
                break
            reason = f"stopping test {sign.value}"
        diag.events.append(f"delta={state.delta}: {reason}")
        state = state.doubled()
    diag.t_u = time.perf_counter() - t1
    diag.t_total = time.perf_counter() - t0
    return SohsCertificate(
        "sdp-compensated", epsilon=eps, u0=u0, u=u, squares=tuple(chol.squares()),
        meta={"delta": state.delta, "delta_c": state.delta_c, "delta_hat": state.delta_hat},
    )


def _cholesky_sum(chol) -> TrigPoly:
    """sum_k s_k s_k* straight from the integer factor (common denominator 2^(2 delta_c))."""
    n = len(chol.l_re)
    c0 = 0
    acc = [[0, 0] for _ in range(n - 1)]
    for k in range(n):
        re = [chol.l_re[j][k] for j in range(n)]
        im = [-chol.l_im[j][k] for j in range(n)]
        a0, rest = mul_star_ints(re, im)
        c0 += a0
        for i, (x, y) in enumerate(rest):
            acc[i][0] += x
            acc[i][1] += y
    den = 1 << (2 * chol.delta_c)
    return TrigPoly(Fraction(c0, den), [Gaussian(Fraction(x, den), Fraction(y, den)) for x, y in acc])


# -------------------------------------------------------------------- csos3

def _ldlt_squares(fac: LdltFactor) -> List[ComplexPoly]:
    """s_k(z) = sum_j conj(L[j][k]) z^perm[j], so that v* Q v = sum_k D_k s_k s_k*."""
    n = fac.n
    out = []
    for k in range(n):
        coeffs = [Gaussian(0)] * n
        for j in range(k, n):
            if fac.L[j][k]:
                coeffs[fac.perm[j]] = fac.L[j][k].conjugate()
        out.append(ComplexPoly(coeffs))
    return out


def csos3(
    f: TrigPoly,
    start: Optional[PrecisionState] = None,
    max_bits: int = DEFAULT_MAX_BITS,
    diag: Optional[Diagnostics] = None,
) -> SohsCertificate:
    """Round-and-project certificate f = sum c_k s_k s_k* with exact LDL*.

    Loop 1 solves the Gram SDP of f until the eigenvalue bound is positive;
    loop 2 rounds at delta_hat bits, projects onto the trace constraints and
    factors exactly, doubling delta_hat until every pivot is positive.  Once
    delta_hat exceeds the precision of the rationalized iterate, control
    returns to loop 1 with doubled delta and R.
    """
    from .circle import trig_has_root_on_circle
    from .errors import NotPositive

    diag = diag if diag is not None else Diagnostics()
    state = start or PrecisionState()
    t0 = time.perf_counter()
    if f.is_zero() or f.value_at_one() <= 0 or trig_has_root_on_circle(f):
        raise NotPositive("polynomial is not positive on the unit circle")
    diag.t_epsilon = 0.0
    d = f.degree
    targets = [Gaussian(f.f0)] + list(f.coeffs)
    while True:
        # loop 1
        while True:
            if state.delta > max_bits:
                raise PrecisionExhausted(f"csos3 exceeded {max_bits} bits")
            diag.history.append(state)
            sol = _gram_solution(f, state)
            if sol is not None and sol.lambda_tilde > 0:
                break
            diag.events.append(f"delta={state.delta}: no positive definite Gram iterate")
            state = replace(state, delta=2 * state.delta, R=2 * state.R)
        # loop 2
        iterate_bits = state.delta + 4 + (d + 1).bit_length()
        fac = None
        while state.delta_hat <= iterate_bits:
            Qhat = sol.Q_tilde.round(state.delta_hat)
            Q = project_gram(Qhat.full(), targets)
            res = ldlt_exact(Q)
            if isinstance(res, LdltFactor) and res.all_positive():
                fac = res
                break
            diag.events.append(f"delta_hat={state.delta_hat}: projected matrix not positive definite")
            state = replace(state, delta_hat=2 * state.delta_hat)
            diag.history.append(state)
        if fac is not None:
            break
        state = replace(state, delta=2 * state.delta, R=2 * state.R)
    diag.t_u = time.perf_counter() - t0
    diag.t_total = time.perf_counter() - t0
    return SohsCertificate(
        "projected", squares=tuple(_ldlt_squares(fac)), weights=tuple(fac.D),
        meta={"delta": state.delta, "delta_c": state.delta_c, "delta_hat": state.delta_hat},
    )


ALGORITHMS = {"csos1": csos1, "csos2": csos2, "csos3": csos3}


# ------------------------------------------------------------------- verify

def _squares_sum(squares: Sequence[ComplexPoly], weights: Optional[Sequence[Fraction]] = None) -> TrigPoly:
    if weights is None:
        return _sum_trig([mul_star(s) for s in squares])
    return _sum_trig([mul_star(s).scale(w) for s, w in zip(squares, weights)])


def verify(f: TrigPoly, cert: SohsCertificate, max_bits: int = 1 << 16) -> Verdict:
    """Exact check of a certificate; rejects with identity-mismatch,
    nonpositive-constant or undecided-sign."""
    try:
        if cert.kind == "projected":
            if len(cert.weights) != len(cert.squares):
                return Verdict(False, "identity-mismatch")
            weights = [as_fraction(w) for w in cert.weights]
            if any(w <= 0 for w in weights):
                return Verdict(False, "nonpositive-constant")
            if _squares_sum(cert.squares, weights) != f:
                return Verdict(False, "identity-mismatch")
            return ACCEPT
        if cert.epsilon is None or cert.u0 is None:
            return Verdict(False, "identity-mismatch")
        eps, u0 = as_fraction(cert.epsilon), as_fraction(cert.u0)
        u = [Gaussian.coerce(c) for c in cert.u]
        u_poly = TrigPoly(u0, u)
        if cert.kind == "roots":
            if cert.a is None:
                return Verdict(False, "identity-mismatch")
            a = as_fraction(cert.a)
            rest = _roots_F([Gaussian.coerce(x) for x in cert.alphas]).scale(a)
        else:
            a = None
            rest = _squares_sum(cert.squares)
        if u_poly + rest + eps != f:
            return Verdict(False, "identity-mismatch")
        if eps <= 0 or (a is not None and a <= 0):
            return Verdict(False, "nonpositive-constant")
    except (TypeError, ValueError, AttributeError, ZeroDivisionError):
        return Verdict(False, "identity-mismatch")
    sign = _compensation_sign(eps, u0, u, max_bits)
    if sign is Sign.POSITIVE:
        return ACCEPT
    if sign is Sign.UNDECIDED:
        return Verdict(False, "undecided-sign")
    return Verdict(False, "nonpositive-constant")


# --------------------------------------------------------------------- JSON

def _opt_frac(x):
    return None if x is None else fraction_to_str(x)


def certificate_to_json(cert: SohsCertificate) -> dict:
    return {
        "kind": cert.kind,
        "epsilon": _opt_frac(cert.epsilon),
        "a": _opt_frac(cert.a),
        "u0": _opt_frac(cert.u0),
        "u": [gaussian_to_json(c) for c in cert.u],
        "alphas": [gaussian_to_json(c) for c in cert.alphas],
        "squares": [s.to_json() for s in cert.squares],
        "weights": [fraction_to_str(w) for w in cert.weights],
        "meta": dict(cert.meta),
    }


def certificate_from_json(data) -> SohsCertificate:
    def frac(key):
        v = data.get(key)
        return None if v is None else fraction_from_str(str(v))

    return SohsCertificate(
        kind=data["kind"],
        epsilon=frac("epsilon"),
        a=frac("a"),
        u0=frac("u0"),
        u=tuple(gaussian_from_json(c) for c in data.get("u", [])),
        alphas=tuple(gaussian_from_json(c) for c in data.get("alphas", [])),
        squares=tuple(ComplexPoly.from_json(s) for s in data.get("squares", [])),
        weights=tuple(fraction_from_str(str(w)) for w in data.get("weights", [])),
        meta={str(k): int(v) for k, v in (data.get("meta") or {}).items()},
    )


def dumps(cert: SohsCertificate) -> str:
    return json.dumps(certificate_to_json(cert), indent=1)


def loads(text: str) -> SohsCertificate:
    return certificate_from_json(json.loads(text))
