"""Exception hierarchy shared by all modules.

Validation-type failures derive from ``ValueError`` so the CLI can map them
to exit code 2; numerical failures map to exit code 1.
"""


class PantsLabError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PantsLabError, ValueError):
    """Bad user input. ``field`` names the offending parameter when known."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class DomainError(ValidationError):
    pass


class UnsupportedSurface(ValidationError):
    pass


class GeneratorError(ValidationError):
    pass


class PreconditionError(ValidationError):
    pass


class EmptySample(ValidationError):
    pass


class AdmissibilityError(ValidationError):
    """A pants foliation patch fails the trapezoid hypotheses.

    ``threshold`` carries the first admissible level of a family, if known.
    """

    def __init__(self, message: str, field: str | None = None, threshold: int | None = None):
        super().__init__(message, field)
        self.threshold = threshold


class NumericalError(PantsLabError, ArithmeticError):
    pass


class ResourceError(PantsLabError, RuntimeError):
    pass
