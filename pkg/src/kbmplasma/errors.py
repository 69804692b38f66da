"""Exception and warning classes shared across the package."""


class KbmError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(KbmError, ValueError):
    """A parameter lies outside its admissible range."""


class DomainError(KbmError, ValueError):
    """Evaluation requested outside the valid spatial domain.

    ``last_valid`` carries the last good state when the error is raised
    from inside an integration or a search.
    """

    def __init__(self, message, last_valid=None):
        super().__init__(message)
        self.last_valid = last_valid


class SingularityError(KbmError, ArithmeticError):
    """A coefficient vanishes where the formula divides by it."""


class ConvergenceError(KbmError, RuntimeError):
    """An iterative solver failed to converge."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class StiffnessError(KbmError, RuntimeError):
    """Adaptive step size underflowed."""


class QuadratureRefusal(KbmError, RuntimeError):
    """Oscillatory quadrature refused because the phase is under-resolved."""


class CflViolation(KbmError, RuntimeError):
    """A particle-in-cell run violated its stability limits."""

    def __init__(self, message, dump_path=None):
        super().__init__(message)
        self.dump_path = dump_path


class NumericalDifferentiationWarning(UserWarning):
    pass


class DiscretizationWarning(UserWarning):
    pass


class RegimeWarning(UserWarning):
    pass
