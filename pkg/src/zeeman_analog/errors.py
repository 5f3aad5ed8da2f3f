"""Exception hierarchy shared by every module of the package."""


class ZeemanError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ZeemanError, ValueError):
    """Invalid model parameter or option.

    The offending field name is kept in ``field`` so callers (the CLI in
    particular) can report it without parsing the message.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


class DomainError(ZeemanError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class RegimeError(DomainError):
    """Parameters outside the regime in which an approximation holds."""


class NoOrbitError(DomainError):
    """No sign change of the orbit equation inside the search bracket."""

    def __init__(self, message, bracket=None, residuals=None):
        super().__init__(message)
        self.bracket = bracket
        self.residuals = residuals


class ConvergenceError(ZeemanError, RuntimeError):
    """Iterative procedure did not converge within its iteration cap."""


class ConsistencyError(ZeemanError):
    """Two objects that must describe the same orbit or mode pair disagree."""


class IntegrationError(ZeemanError, RuntimeError):
    """ODE integration hit a guard; ``state`` holds the last good state."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class SamplingError(ZeemanError, ValueError):
    """Sampling too coarse for a well-defined result (e.g. phase unwrapping)."""


class WeakFieldWarning(UserWarning):
    """Emitted when a perturbative formula is used near the edge of its regime."""
