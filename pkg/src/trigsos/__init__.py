"""Exact sum-of-Hermitian-squares certificates for positive trigonometric polynomials."""

from .arith import Gaussian, DyadicInterval, Sign, sign_of_root_sum
from .certify import (
    Diagnostics,
    PrecisionState,
    SohsCertificate,
    Verdict,
    certificate_from_json,
    certificate_to_json,
    csos1,
    csos2,
    csos3,
    verify,
)
from .circle import find_epsilon, has_real_root_on_circle
from .errors import CertificationError, NotPositive, ParseError, PrecisionExhausted
from .trigpoly import ComplexPoly, TrigPoly, gauss_family, parse_trigpoly

__version__ = "0.1.0"

__all__ = [
    "Gaussian", "DyadicInterval", "Sign", "sign_of_root_sum",
    "TrigPoly", "ComplexPoly", "parse_trigpoly", "gauss_family",
    "find_epsilon", "has_real_root_on_circle",
    "csos1", "csos2", "csos3", "verify", "SohsCertificate", "PrecisionState", "Diagnostics", "Verdict",
    "certificate_to_json", "certificate_from_json",
    "CertificationError", "NotPositive", "ParseError", "PrecisionExhausted",
]
