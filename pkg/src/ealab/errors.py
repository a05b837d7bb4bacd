"""Exception types shared across the package."""


class UsageError(ValueError):
    """Caller passed arguments that violate an operation's preconditions."""


class DomainError(ValueError):
    """The mathematical object does not satisfy a required property."""


class ResourceError(RuntimeError):
    """A configured work or horizon bound was exceeded."""
