"""Exception hierarchy shared by all modules."""


class CoshLiborError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CoshLiborError, ValueError):
    """Argument lies outside the real moment-generating domain of the process."""


class IllConditionedError(DomainError):
    """Argument is inside the domain but too close to its boundary."""


class CalibrationError(CoshLiborError):
    """The discount curve cannot be reproduced by the process.

    ``index`` is the 1-based tenor index of the offending bond, when known.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class PreconditionError(CoshLiborError, ValueError):
    """An instrument or model violates a pricing precondition."""


class NumericalError(CoshLiborError, ArithmeticError):
    """A bracketing or root-finding routine failed to converge."""


class IntegrationError(NumericalError):
    """Quadrature did not meet its tolerance; ``estimate`` holds the best value."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ConfigError(CoshLiborError, ValueError):
    """Malformed or inconsistent configuration document."""
