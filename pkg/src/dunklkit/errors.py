"""Exception hierarchy shared by every dunklkit module."""


class DunklkitError(Exception):
    """Base class for library errors."""


class DomainError(DunklkitError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NonConvergence(DunklkitError, ArithmeticError):
    """An iterative or adaptive procedure exhausted its budget.

    The best available estimate is kept on ``value`` and ``error``.
    """

    def __init__(self, msg, value=None, error=None):
        super().__init__(msg)
        self.value = value
        self.error = error


class InvalidInterval(DunklkitError, ValueError):
    pass


class SingularInteriorUnhandled(DunklkitError, ArithmeticError):
    pass


class TailBoundExceeded(DunklkitError, ArithmeticError):
    pass


class MethodUnavailable(DunklkitError, ValueError):
    pass


class SingularPoint(DunklkitError, ValueError):
    pass


class StepUnderflow(DunklkitError, ArithmeticError):
    pass


class FamilyOutsideGrid(DunklkitError, ValueError):
    pass


class GrowthConditionFailed(DunklkitError, ArithmeticError):
    pass


class InvalidAtom(DunklkitError, ValueError):
    pass


class MeanNotZero(DunklkitError, ValueError):
    pass


class FrequencyProjectionFailed(DunklkitError, ArithmeticError):
    pass
