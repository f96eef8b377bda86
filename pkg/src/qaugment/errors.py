class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class ResourceLimitError(RuntimeError):
    """Raised when a request would exceed a configured memory guard."""
