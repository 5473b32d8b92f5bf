"""Exception types shared across the library."""


class HalfPoundError(ValueError):
    """Base class for all library errors."""


class InvalidTimestep(HalfPoundError):
    """A sample arrived with dt <= 0."""


class InvalidSample(HalfPoundError):
    """A sample value is NaN or infinite."""


class InsufficientSamples(HalfPoundError):
    """A channel is too short for the requested analysis."""


class DegenerateChannel(HalfPoundError):
    """A channel carries no usable signal (flat / zero power)."""


class CoverageError(HalfPoundError):
    """A transition window extends past the available clip data."""


class BvhParseError(HalfPoundError):
    """Malformed BVH text. Carries the 1-based line number of the offence."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line
