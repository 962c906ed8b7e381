# The MIT License (MIT)
# © 2026 sysflow contributors
# fmt: off


class SysflowError(Exception):
    """Base class for errors raised by sysflow itself."""


class DimensionMismatchError(SysflowError, ValueError):
    """Operands cannot be multiplied: inner dimensions differ, or a matrix is empty / not 2-D."""


class TraceTooLargeError(SysflowError):
    """A trace was requested for a shape too large to read."""


class CrossValidationError(SysflowError):
    """The functional simulator disagrees with the analytical model or the reference product."""


class OutputError(SysflowError):
    """A report file could not be written."""

    def __init__(self, path, cause: Exception):
        self.path = str(path)
        self.cause = cause
        super().__init__(f"Failed to write {self.path}: {cause}")


__all__ = [
    "SysflowError",
    "DimensionMismatchError",
    "TraceTooLargeError",
    "CrossValidationError",
    "OutputError",
]
