"""Exception hierarchy shared by all modules."""


class CasimirError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(CasimirError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class LimitModelError(CasimirError, TypeError):
    """A limit marker was passed where a pointwise response is required."""


class TabulatedDataError(CasimirError, ValueError):
    """A tabulated permittivity file could not be parsed or validated."""


class UnsupportedConfigurationError(CasimirError, ValueError):
    """The stack mixes limit markers with real materials, or is otherwise unsupported."""


class DegenerateInputError(CasimirError, ArithmeticError):
    """A coefficient denominator or limiting determinant vanished."""


class PassivityError(CasimirError, ValueError):
    """A reflection quantity exceeds the bound allowed for passive media."""


class ConditioningError(CasimirError, ArithmeticError):
    """Matrix entries overflowed despite column scaling."""


class SplitUnavailableError(CasimirError, ValueError):
    """A polarization split was requested for a configuration that has none."""


class MisuseError(CasimirError, ValueError):
    """An operation was called outside its documented preconditions."""


class ConfigError(CasimirError, ValueError):
    """Invalid run configuration; the message names the offending field path."""


class ConvergenceError(CasimirError, RuntimeError):
    """Adaptive quadrature exhausted its evaluation budget.

    Attributes
    ----------
    value : float
        Best integral estimate at the moment the budget ran out.
    error_estimate : float
        Achieved absolute error estimate.
    evaluations : int
        Number of integrand evaluations spent.
    """

    def __init__(self, message: str, value: float, error_estimate: float, evaluations: int):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.evaluations = evaluations
