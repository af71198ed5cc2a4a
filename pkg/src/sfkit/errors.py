"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the domain where an operation is defined."""


class ChainError(DomainError):
    """A fan does not describe a chain of smooth rational curves."""


class MinimalFan(Exception):
    """Raised by a blow-down step when no (-1)-ray can be removed."""


class RegimeError(DomainError):
    """Parameters outside the regime where an asymptotic budget applies."""


class DegenerateMetric(DomainError):
    """The metric (or complex structure) degenerates at the requested point."""


class ConfigError(DomainError):
    """A configuration file could not be parsed or validated."""
