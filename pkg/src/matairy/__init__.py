"""Matrix Airy function: integral representations, cross-checks and a CLI."""

from .errors import (
    AiryError,
    ConfluentSpectrum,
    DegenerateFit,
    DimensionMismatch,
    DomainError,
    InvalidGrid,
    NonConvergence,
)
from .oscillatory_quad import DEFAULT_CONFIG, Evaluation, QuadratureConfig
from .scalar_airy import AiryValue, airy

__version__ = "0.1.0"
