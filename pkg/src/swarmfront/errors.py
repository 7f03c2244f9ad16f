"""Shared exception types."""


class ConfigurationError(ValueError):
    """Raised when user-supplied parameters or configuration files are invalid."""


class InstanceFormatError(ValueError):
    """Raised when a benchmark instance file cannot be parsed or fails validation."""
