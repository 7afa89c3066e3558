"""Exception types shared across the library."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class IllConditionedError(RuntimeError):
    """A matrix factorization failed even after the jitter escalation budget."""


class CacheLimitError(RuntimeError):
    """A sample-path cache exceeded its configured bound."""


class ConfigError(ValueError):
    """An experiment configuration is missing, malformed, or inconsistent."""


class ProtocolError(RuntimeError):
    """The ask/tell exchange was driven out of order or with mismatched data."""
