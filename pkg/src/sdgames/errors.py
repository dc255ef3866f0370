class SdGameError(Exception):
    """Base class for errors raised by this package."""


class ContractViolation(SdGameError, ValueError):
    """An input breaks a documented precondition."""


class NumericalFailure(SdGameError, RuntimeError):
    """An iterative method failed to converge."""


class UnsupportedConfiguration(SdGameError, ValueError):
    """The inputs are valid but outside what the routine supports."""
