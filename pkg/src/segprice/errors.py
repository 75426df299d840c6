"""Exception hierarchy shared by every module."""


class SegpriceError(Exception):
    """Base class for all library errors."""


class DomainError(SegpriceError, ValueError):
    """A price lies outside the range an operation accepts."""


class PreconditionError(SegpriceError, ValueError):
    """An instance does not satisfy the structural requirements of an operation."""


class ConfigurationError(SegpriceError, ValueError):
    """The search domain cannot be determined (e.g. unbounded support without a cap)."""


class ConstructionError(SegpriceError):
    """A named instance family could not be generated.

    ``condition`` names the violated requirement so the CLI can report it.
    """

    def __init__(self, message: str, condition: str = ""):
        super().__init__(message)
        self.condition = condition


class InfeasibleProfile(SegpriceError):
    """A threshold profile admits no finite interim rent vector (positive-gain cycle)."""


class InvariantViolation(SegpriceError):
    """A certified inequality failed on a computed report."""


class SpecError(SegpriceError, ValueError):
    """An instance file could not be parsed or validated."""
