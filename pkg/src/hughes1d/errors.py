"""Exception types shared across the package."""


class Hughes1DError(Exception):
    """Base class for all package errors."""


class DomainError(Hughes1DError, ValueError):
    """A density was evaluated outside the admissible range."""


class ModelError(Hughes1DError, ValueError):
    """Velocity/cost definition violates the structural assumptions."""


class AtomizationError(Hughes1DError, ValueError):
    """Initial datum cannot be converted into an equal-mass particle set."""


class BracketingError(Hughes1DError, RuntimeError):
    """The index pattern required by the turning-point velocity formula
    does not hold for the current particle configuration."""


class OrderingError(Hughes1DError, RuntimeError):
    """Particle positions lost their strict ordering."""


class StepSizeError(Hughes1DError, RuntimeError):
    """Adaptive step size underflowed; carries the offending state."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class CFLError(Hughes1DError, ValueError):
    """Requested time step violates the CFL stability bound."""


class ConfigError(Hughes1DError, ValueError):
    """Run configuration is missing, malformed or inconsistent."""
