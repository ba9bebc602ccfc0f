"""Exception types shared across the package.

Everything derives from ValueError so callers that only know the standard
library can still catch failures the usual way.
"""


class LagcastError(ValueError):
    """Base class for all errors raised by this package."""


class ParseError(LagcastError):
    """Malformed input file (bad date, non-numeric field, missing header)."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(LagcastError):
    """Structurally valid input violating a data invariant (duplicate dates,
    OHLC ordering, and so on)."""


class AlignmentError(LagcastError):
    """No common trading dates between instruments."""


class SplitError(LagcastError):
    """A chronological split would leave one side empty."""


class DegenerateColumnError(LagcastError):
    """A column (or input vector) is constant where variation is required."""


class InputError(LagcastError):
    """Arguments that fail an operation's preconditions (shape mismatch,
    non-finite values, out-of-range counts)."""


class RankError(LagcastError):
    """Rank-deficient design matrix in least squares."""


class ConfigError(LagcastError):
    """Invalid experiment or generator configuration."""
