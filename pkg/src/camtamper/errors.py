"""Exception hierarchy shared across the package."""


class TamperError(Exception):
    """Base class for all package errors."""


class FormatError(TamperError, ValueError):
    """Malformed file header or payload structure."""


class UnsupportedError(TamperError, ValueError):
    """Well-formed input using a feature this package does not handle."""


class TruncatedError(TamperError, OSError):
    """Payload ended before the declared number of bytes."""


class DomainError(TamperError, ValueError):
    """Argument outside the operation's domain (bad size, range, shape)."""


class StateError(TamperError, RuntimeError):
    """Operation invoked on an object in the wrong state."""


class ConfigError(TamperError, ValueError):
    """Invalid detector or run configuration."""


class ValidationError(TamperError, ValueError):
    """Scenario or schema validation failure."""
