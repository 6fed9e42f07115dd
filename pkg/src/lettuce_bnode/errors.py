"""Exception hierarchy shared across the toolkit.

Every module raises a subclass of GreenhouseError so the CLI can catch one
base type and map it to a nonzero exit code.
"""


class GreenhouseError(Exception):
    """Base class for all toolkit errors."""


class DegenerateDenominator(GreenhouseError):
    """Photosynthesis denominator too close to zero to divide by."""


class NonFiniteState(GreenhouseError):
    """An integration step produced a NaN/Inf or negative-mass state."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class InvalidProfile(GreenhouseError):
    """Weather profile parameters would produce unphysical disturbances."""


class ParseError(GreenhouseError):
    """Malformed cell or header in an input CSV."""


class NonMonotoneTime(GreenhouseError):
    """Timestamps in a weather CSV are not strictly increasing."""


class IrregularPeriod(GreenhouseError):
    """A timestamp gap deviates more than 1% from the inferred period."""


class IncompatiblePeriods(GreenhouseError):
    """Resampling target period is not a compatible multiple of the source."""


class InsufficientData(GreenhouseError):
    """Not enough samples to compute statistics."""


class EmptyBatch(GreenhouseError):
    """A training batch contained no rows."""


class DivergedLoss(GreenhouseError):
    """Training loss became NaN or Inf."""


class SchemaMismatch(GreenhouseError):
    """Checkpoint file missing, truncated, or structurally incompatible."""


class TooFewMembers(GreenhouseError):
    """Ensemble too small for the requested confidence level."""


class LengthMismatch(GreenhouseError):
    """Forecast summary and truth trajectory have different lengths."""
