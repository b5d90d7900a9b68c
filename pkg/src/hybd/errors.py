"""Exception types shared across the package."""


class HybdError(Exception):
    """Base class for all package errors."""


class InvalidArgument(HybdError, ValueError):
    pass


class DesignInfeasible(HybdError, ValueError):
    """A dimension condition needed by a precoding scheme does not hold."""


class NoUsableStreams(HybdError, ValueError):
    pass


class ConfigError(HybdError, ValueError):
    pass


class ConditioningWarning(UserWarning):
    """Emitted when a covariance had to be ridge-regularized."""
