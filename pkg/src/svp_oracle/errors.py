"""Exception types raised across the toolkit."""


class SvpOracleError(Exception):
    """Base class for all toolkit errors."""


class InvalidBasisError(SvpOracleError):
    """Basis is malformed, has the wrong shape or is rank deficient."""


class CircuitError(SvpOracleError):
    """Gate, register or circuit text is invalid."""


class ResourceCapError(SvpOracleError):
    """A configured simulation or enumeration cap would be exceeded."""


class WidthPlanOverflowError(ResourceCapError):
    """An intermediate value does not fit its planned register width."""


class SimulationError(SvpOracleError):
    """Circuit cannot be simulated by the requested engine."""


class FitError(SvpOracleError):
    """Least-squares fit is underdetermined or rank deficient."""


class InvalidInputError(SvpOracleError, ValueError):
    """Arguments fall outside the domain an operation is defined on."""
