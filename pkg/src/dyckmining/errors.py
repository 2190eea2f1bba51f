"""Exception types raised across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where a formula or model is defined."""


class CapExceededError(ValueError):
    """An exhaustive enumeration was requested beyond its configured cap."""


class UnsupportedStrategyError(ValueError):
    """The operation is not defined for the requested strategy."""


class MissingEthParamsError(ValueError):
    """An Ethereum strategy was requested without Ethereum parameters."""
