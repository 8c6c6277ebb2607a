"""Exception types shared across the package."""


class RiffleScramblerError(Exception):
    """Base class for every error raised by this package."""


class UsageError(RiffleScramblerError, ValueError):
    """Raised when an argument violates a documented precondition."""


class ResourceError(RiffleScramblerError, RuntimeError):
    """Raised when memory or entropy cannot be obtained."""


class InternalError(RiffleScramblerError, RuntimeError):
    """Raised when an internal guard trips (e.g. the shuffle round cap)."""


class PhcDecodeError(RiffleScramblerError, ValueError):
    """Raised for a malformed encoded hash string."""
