"""Exception types shared across the package."""


class SandpileError(Exception):
    """Base class for package errors."""


class GuardExceeded(SandpileError):
    """An exhaustive routine would exceed its configured size or state budget."""

    def __init__(self, what: str, limit):
        super().__init__(f"{what} exceeds guard (limit {limit})")
        self.what = what
        self.limit = limit


class NotRecurrentError(SandpileError, ValueError):
    """Raised when an operation requires a recurrent configuration.

    ``witness`` holds whatever evidence the failing checker produced.
    """

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness
