"""Exception hierarchy shared by all sposs modules."""


class SpossError(Exception):
    """Base class for all library-specific errors."""


class DomainError(SpossError, ValueError):
    """An element id falls outside the ground set of the queried view."""


class PreconditionError(SpossError, ValueError):
    """A documented operation precondition was violated by the caller."""


class KindError(SpossError, TypeError):
    """An operation was applied to a system/objective kind it does not support."""


class SizeLimitError(SpossError, ValueError):
    """An exact solver or enumerator was asked for more than its size cap."""


class InvariantError(SpossError, RuntimeError):
    """An internal invariant failed; indicates a bug, not a usage error."""
