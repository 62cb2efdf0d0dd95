"""Exception types.  ``ValidationError`` maps to CLI exit code 2 and
``SolverBudgetExceeded`` to exit code 3."""


class ThetaSingError(Exception):
    pass


class ValidationError(ThetaSingError, ValueError):
    pass


class NotSymmetric(ValidationError):
    pass


class NotPositiveDefinite(ValidationError):
    pass


class OrderTooHigh(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class OrderMismatch(ValidationError):
    pass


class NotSingular(ValidationError):
    pass


class BasePointNotSingular(ValidationError):
    pass


class ZeroLeadingCoefficient(ValidationError):
    pass


class ZeroShift(ValidationError):
    pass


class NotAVerticalSingularity(ValidationError):
    pass


class DegeneratePencil(ValidationError):
    pass


class ConstantVertex(ValidationError):
    pass


class EmptySolutionSpace(ValidationError):
    pass


class UnluckySubspace(ValidationError):
    pass


class InvalidInput(ValidationError):
    pass


class SolverBudgetExceeded(ThetaSingError):
    pass
