class CuntzError(Exception):
    """Base class for every error raised by cuntzendo."""


class UsageError(CuntzError, ValueError):
    """Arguments that do not fit together (mismatched n, bad profile, ...)."""


class DomainError(CuntzError, ValueError):
    """A mathematical precondition does not hold for the given input."""


class ResourceError(CuntzError, RuntimeError):
    """A configured size cap (terms, level, group order, search guard) was exceeded."""


class ParseError(CuntzError, ValueError):
    """Malformed element, permutation, group or configuration input."""
