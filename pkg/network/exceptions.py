class CacheNetError(ValueError):
    """Base class for every error raised by the simulator."""


class InvalidParameters(CacheNetError):
    pass


class InfeasibleDemand(CacheNetError):
    """Distinct-mode sampling asked for more files than the library offers."""


class InconsistentInstance(CacheNetError):
    """Cache configuration, demand matrix and parameters disagree on shape."""


class UnknownVertex(CacheNetError):
    pass


class ImproperColoring(CacheNetError):
    pass


class GraphTooLarge(CacheNetError):
    pass


class FieldTooSmall(CacheNetError):
    pass


class MissingPayload(CacheNetError):
    pass


class DimensionMismatch(CacheNetError):
    pass


class DecodingError(CacheNetError):
    """A user could not recover a requested packet. Never expected."""

    def __init__(self, message, user=None, vertex=None):
        super().__init__(message)
        self.user = user
        self.vertex = vertex
