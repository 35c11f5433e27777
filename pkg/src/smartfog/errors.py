"""Exception types shared across the package."""


class SmartFogError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(SmartFogError, ValueError):
    """A parameter or config file value is invalid; message names the field."""


class ContractError(SmartFogError, ValueError):
    """A call violated an operation precondition (arity, missing entry, empty input)."""


class TopologyError(SmartFogError):
    """The overlay graph does not satisfy a structural requirement (e.g. connectivity)."""


class CapacityError(SmartFogError):
    """A request exceeds what the overlay can supply (gateways, cluster members)."""


class ChurnRejectedError(SmartFogError):
    """A churn event was refused because applying it would disconnect the overlay."""


class ConflictError(SmartFogError):
    """A churn event collides with existing state (e.g. duplicate device id)."""


class NumericalError(SmartFogError):
    """An iterative numerical routine failed to converge."""

    def __init__(self, message: str, iterations: int | None = None):
        super().__init__(message)
        self.iterations = iterations
