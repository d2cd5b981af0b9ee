"""Module with all custom exceptions"""


class DiscError(Exception):
    """
    Base class for every error raised by the disc toolkit. The command line maps it to exit code 1.
    """


class TreeValidationError(DiscError):
    """
    Raised when a scene description does not describe a legal disc tree. All violations found are collected
    before raising, so a single run reports every broken invariant.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnknownPointError(DiscError):
    pass


class PointError(DiscError):
    """Raised for ill-formed tree points, e.g. an edge offset that is not strictly interior."""


class SubtreeError(DiscError):
    pass


class InfiniteArithmeticError(DiscError, ArithmeticError):
    """Raised for the undefined combinations inf + (-inf) and 0 * inf."""


class QshValidationError(DiscError):

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class MismatchedTreesError(DiscError):
    pass


class ShapeError(DiscError):
    """Raised when a function does not have the shape an exact formula requires."""


class NormalizationError(DiscError):
    pass


class ExtensionPreconditionError(DiscError):
    pass


class ExtensionDefect(DiscError):
    """
    Raised when the extension algorithm produces a certificate that fails exact verification, or when the
    reduction runs past its step budget. Either case is an implementation defect, never a legitimate outcome.
    """


class ValidationException(DiscError):
    pass


class UsageError(DiscError):
    pass
