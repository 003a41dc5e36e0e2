"""Exception hierarchy. Every error raised on bad input derives from LeviFlatError."""


class LeviFlatError(Exception):
    """Base class; the CLI maps any of these to exit code 2."""


class StructuralError(LeviFlatError):
    """Variable-count mismatch, wrong variable support, zero inputs."""


class SymmetryError(LeviFlatError):
    """A form that must be Hermitian is not."""


class DegreeError(LeviFlatError):
    """A bidegree requirement is violated."""


class DimensionError(LeviFlatError):
    """Unsupported ambient dimension."""


class DegenerateInputError(LeviFlatError):
    """Identically zero curve or defining form."""


class PreconditionError(LeviFlatError):
    """An operation's stated precondition does not hold (e.g. point not on H)."""


class NotSmoothError(LeviFlatError):
    """Gradient too small to define a complex tangent space."""


class SamplingError(LeviFlatError):
    """Sampler could not produce the requested number of accepted points."""

    def __init__(self, message, attempts=0, accepted=0):
        super().__init__(message)
        self.attempts = attempts
        self.accepted = accepted


class OversamplingError(LeviFlatError):
    """Too few sample rows for a rank computation."""


class ParseError(LeviFlatError):
    """Text input could not be parsed; carries a 1-based line and column."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
