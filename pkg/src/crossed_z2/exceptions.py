"""Exceptions raised across the package, mapped to CLI exit codes."""


class CrossedZ2Error(Exception):
    """Base class for every error raised by crossed_z2."""


class InvalidInputError(CrossedZ2Error, ValueError):
    """Malformed input or a violated precondition (exit code 2)."""


class NotHermitianError(InvalidInputError):
    """A self-adjoint matrix was expected."""

    def __init__(self, message: str = "not hermitian") -> None:
        super().__init__(message)


class NumericalToleranceError(CrossedZ2Error, RuntimeError):
    """A computation broke down numerically (exit code 3)."""


class PropertyViolationError(CrossedZ2Error, AssertionError):
    """A checked mathematical property failed (exit code 4)."""
