"""Exception and warning types raised by the numerical kernels."""


class LinAlgError(ArithmeticError):
    """Base class for numerical failures."""


class SingularMatrix(LinAlgError):
    """A pivot underflowed during LU factorization."""


class RankDeficient(LinAlgError):
    """The input does not have full column rank to working precision."""


class NotHermitian(LinAlgError, ValueError):
    """The input is not Hermitian up to roundoff."""


class NotPositiveDefinite(LinAlgError):
    """The input has an eigenvalue too close to (or below) zero."""


class NotConverged(LinAlgError):
    """An iteration exhausted its budget without meeting its tolerance."""


class ComplexInput(ValueError):
    """A real-only routine received data with nonzero imaginary parts."""


class EntryOverflow(OverflowError):
    """An integer-valued construction exceeded the exactly representable range."""


class MatrixFormatError(ValueError):
    """Malformed matrix text input. ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class NearSingularWarning(RuntimeWarning):
    """Pairwise singular value sums are tiny relative to the largest one."""
