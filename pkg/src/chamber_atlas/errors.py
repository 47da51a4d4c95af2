"""Exception hierarchy shared by every module."""


class AtlasError(Exception):
    """Base class for library errors."""


class BoundsError(AtlasError, ValueError):
    """A size parameter is outside the supported range."""


class DomainError(AtlasError, ValueError):
    """An argument violates a mathematical precondition."""


class StructuralError(AtlasError, ValueError):
    """Malformed input data (wrong lengths, unknown variables, ...)."""


class ResourceError(AtlasError, RuntimeError):
    """A configured search or counting budget was exhausted."""


class InvariantError(AtlasError, AssertionError):
    """Two independent computations disagreed."""
