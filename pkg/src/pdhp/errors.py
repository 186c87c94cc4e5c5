"""Exception types shared across the package."""


class PdhpError(Exception):
    """Base class for package errors."""


class DomainError(PdhpError, ValueError):
    """An argument is outside its mathematical domain."""


class ConfigurationError(PdhpError, ValueError):
    """Mismatched or invalid configuration (e.g. weight/kernel length)."""


class StreamOrderError(PdhpError, ValueError):
    """A document arrived out of timestamp order."""


class IntegrityError(PdhpError, RuntimeError):
    """Internal state would become inconsistent (e.g. negative counts)."""


class DataError(PdhpError, ValueError):
    """Malformed input data (corpus files, grid files)."""
