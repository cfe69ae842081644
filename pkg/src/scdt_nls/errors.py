"""Exception types shared across the package."""


class ScdtNlsError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(ScdtNlsError):
    """Structurally invalid input, e.g. ragged rows or a bad file version."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class ParseError(FormatError):
    """A token could not be parsed as a number."""

    def __init__(self, message, row=None, col=None):
        super().__init__(message, row=row)
        self.col = col


class EmptyDataset(ScdtNlsError):
    """A dataset source contained no records."""


class SplitError(ScdtNlsError):
    """A stratified split cannot be performed as requested."""


class NegativeInput(ScdtNlsError):
    """A nonnegative signal was required but negative samples were found."""


class ZeroMass(ScdtNlsError):
    """Total mass of a signal is at or below the zero threshold."""


class InvalidFeature(ScdtNlsError):
    """A transform feature violates its invariants."""


class NonIncreasingWarp(ScdtNlsError):
    """A time warp is not strictly increasing on the signal domain."""


class InvalidOrder(ScdtNlsError):
    """An enrichment order outside the valid range was requested."""


class DimensionError(ScdtNlsError):
    """Mismatched vector, grid, or matrix dimensions."""


class DegenerateSpan(ScdtNlsError):
    """All spanning vectors are zero; no basis can be formed."""


class ConfigError(ScdtNlsError):
    """Invalid or inconsistent configuration values."""


class GenerationError(ScdtNlsError):
    """Synthetic data generation failed, e.g. warp rejection limit hit."""


class IntegrityError(ScdtNlsError):
    """A stored artifact is truncated or internally inconsistent."""


class UnknownTemplate(ScdtNlsError):
    """An unrecognized template kind was requested."""
