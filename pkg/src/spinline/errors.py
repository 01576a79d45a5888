"""Exception and warning types raised across the package."""


class SpinlineError(Exception):
    """Base class for all package errors."""


class InvalidLengthError(SpinlineError, ValueError):
    pass


class InvalidParameterError(SpinlineError, ValueError):
    pass


class OracleScaleExceeded(SpinlineError, ValueError):
    pass


class DegenerateParametrizationError(SpinlineError, ValueError):
    pass


class NumericalFailure(SpinlineError, ArithmeticError):
    """A numerical routine failed or produced an unphysical result.

    ``matrix`` carries the offending input when one is available, so that the
    failure can be reproduced.
    """

    def __init__(self, message, matrix=None):
        super().__init__(message)
        self.matrix = matrix


class InconsistentAmplitudesError(NumericalFailure):
    pass


class UnitarityViolationError(NumericalFailure):
    pass


class PhaseUndefinedWarning(UserWarning):
    pass
