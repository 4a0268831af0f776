"""Error types shared across the toolkit."""


class SingularGeometryError(ValueError):
    """A scatterer or image pixel coincides with an antenna position (R = 0)."""


class InvalidStateError(RuntimeError):
    """An operation was invoked on an object missing required context (e.g. Z0 unset)."""


class GenerationError(RuntimeError):
    """Randomized generation could not satisfy its constraints within bounded retries."""


class CorruptDataError(RuntimeError):
    """A serialized artifact failed its integrity check."""
