"""Exception types shared across the package."""


class RelaySimError(Exception):
    """Base class for all relaysim errors."""


class InvalidParameterError(RelaySimError, ValueError):
    """A caller-supplied parameter is out of range or malformed."""


class DegenerateInputError(RelaySimError, ValueError):
    """Input is mathematically degenerate (zero channel, zero matrix, ...)."""


class NumericalError(RelaySimError, ArithmeticError):
    """A numerical routine failed (singular system, dimension mismatch, ...)."""


class InsufficientStatisticsError(RelaySimError, ValueError):
    """Monte Carlo data is too sparse for the requested estimate."""
