"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError (and its
subclasses) -> 2, InvariantViolation -> 3. Pure numerical functions raise
plain ValueError for bad inputs.
"""


class MaceError(Exception):
    """Base class for package errors."""


class ConfigError(MaceError):
    """Invalid or unreadable run configuration."""


class DataError(MaceError):
    """Malformed market data: schema, calendar, or value problems."""


class WarmupError(DataError):
    """A derived quantity was requested before its warm-up window is full."""


class InvariantViolation(MaceError):
    """An internal accounting invariant broke; indicates a bug, not bad input."""
