"""Exception hierarchy for the quaternary lattice library."""


class QuaternaryError(Exception):
    """Base class for library errors."""


class ConsistencyError(QuaternaryError, RuntimeError):
    """A computed identity or cross-check failed; this signals a bug."""


class SearchCapExceeded(QuaternaryError):
    """A bounded search (norm equation, class order) ran out of budget."""


class UsageError(QuaternaryError, ValueError):
    """Command line input could not be parsed."""
