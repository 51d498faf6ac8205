"""Exception hierarchy shared by the engine and the harness."""

from __future__ import annotations


class DualBBGKYError(Exception):
    """Base class for every error raised by this package."""


class CapacityError(DualBBGKYError):
    """A size guard (partition count, particle number, dimension) was exceeded."""


class LabelError(DualBBGKYError, ValueError):
    """Particle labels are inconsistent with the requested operation."""


class ValidationError(DualBBGKYError, ValueError):
    """Input failed validation; ``field`` names the offending item."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class AbsentPotentialError(DualBBGKYError, LookupError):
    """No interaction potential of the requested body order is configured."""


class NormalizationError(DualBBGKYError, ArithmeticError):
    """The normalizing factor of a state sequence is not a positive finite number."""


class ConfigParseError(DualBBGKYError):
    """A scenario file could not be parsed."""

    def __init__(self, path: str, message: str, line: int | None = None, column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        where = f"{path}"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {message}")
