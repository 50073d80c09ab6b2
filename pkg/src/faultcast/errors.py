"""Exception types shared across the package."""


class FaultcastError(Exception):
    """Base class for all faultcast errors."""


class DomainError(FaultcastError, ValueError):
    """A numeric argument lies outside the mathematical domain of an operation."""


class InputError(FaultcastError, ValueError):
    """Malformed user input: files, configuration, or incompatible artifacts."""


class InitializationError(FaultcastError, RuntimeError):
    """The sampler could not find a starting point with finite target density."""


class EvaluationError(FaultcastError, RuntimeError):
    """A target density returned NaN or +inf at a finite point."""
