"""Single-field mutations of an SOHS certificate; each must be rejected by verify()."""

from dataclasses import replace
from fractions import Fraction

from trigsos.arith import Gaussian
from trigsos.certify import KINDS
from trigsos.trigpoly import ComplexPoly

BUMP = Fraction(1, 7)


def _bump_seq(seq, i, value):
    out = list(seq)
    out[i] = value
    return tuple(out)


def tampered_variants(cert, per_field=3):
    """Yield (label, certificate) pairs, each differing from cert in exactly one field."""
    for name in ("epsilon", "a", "u0"):
        v = getattr(cert, name)
        if v is not None:
            yield name, replace(cert, **{name: v + BUMP})
    for i, c in enumerate(cert.u[:per_field]):
        yield f"u[{i}]", replace(cert, u=_bump_seq(cert.u, i, c + Gaussian(BUMP)))
        yield f"u[{i}].im", replace(cert, u=_bump_seq(cert.u, i, c + Gaussian(0, BUMP)))
    for i, c in enumerate(cert.alphas[:per_field]):
        yield f"alphas[{i}]", replace(cert, alphas=_bump_seq(cert.alphas, i, c + Gaussian(BUMP)))
    for i, s in enumerate(cert.squares[:per_field]):
        coeffs = list(s.coeffs)
        j = len(coeffs) - 1
        coeffs[j] = coeffs[j] + Gaussian(BUMP)
        yield f"squares[{i}]", replace(cert, squares=_bump_seq(cert.squares, i, ComplexPoly(coeffs)))
    for i, w in enumerate(cert.weights[:per_field]):
        yield f"weights[{i}]", replace(cert, weights=_bump_seq(cert.weights, i, w + BUMP))
    for kind in KINDS:
        if kind != cert.kind:
            yield f"kind={kind}", replace(cert, kind=kind)
