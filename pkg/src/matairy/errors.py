"""Exception types raised across the package."""


class AiryError(Exception):
    """Base class for all package errors."""


class DomainError(AiryError, ValueError):
    """Argument outside the supported domain of an operation."""


class NonConvergence(AiryError, RuntimeError):
    """A regularized quadrature failed to stabilize."""


class DimensionMismatch(AiryError, ValueError):
    pass


class ConfluentSpectrum(AiryError, ValueError):
    """Spectrum has (numerically) coincident entries where distinct ones are required."""


class DegenerateFit(AiryError, RuntimeError):
    pass


class InvalidGrid(AiryError, ValueError):
    pass
