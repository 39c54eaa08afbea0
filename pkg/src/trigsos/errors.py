"""Exception types raised by the certification pipeline."""


class CertificationError(Exception):
    """Base class for all failures raised by this package."""


class NotPositive(CertificationError):
    """The input polynomial is not positive on the unit circle."""


class IterationCap(CertificationError):
    """The epsilon-halving search ran past its configured number of halvings."""


class PrecisionExhausted(CertificationError):
    """A precision-doubling loop exceeded its configured bit cap."""


class PairingFailed(CertificationError):
    """Root approximations could not be matched into reciprocal-conjugate pairs."""


class SolverStalled(CertificationError):
    """The interior-point solver stopped before reaching the requested accuracy."""


class Infeasible(CertificationError):
    """The solver reported primal or dual infeasibility."""


class PivotNonpositive(CertificationError):
    """A finite-precision Cholesky pivot was not strictly positive."""


class ProjectionBrokePsd(CertificationError):
    """Rounding and projection produced a Gram matrix that is not PSD."""


class SpecError(ValueError):
    """Invalid filter specification."""


class ParseError(ValueError):
    """Malformed polynomial text, with a 1-based line/column position."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
