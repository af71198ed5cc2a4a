"""Resolution combinatorics, parabolic stability and explicit ALE metrics for scalar-flat Kähler blow-ups."""
from .errors import ChainError, ConfigError, DegenerateMetric, DomainError, MinimalFan, RegimeError
from .hjfrac import HJExpansion, ReducedFraction, hj_eval, hj_expand

__version__ = "0.1.0"

__all__ = [
    "ChainError",
    "ConfigError",
    "DegenerateMetric",
    "DomainError",
    "MinimalFan",
    "RegimeError",
    "HJExpansion",
    "ReducedFraction",
    "hj_eval",
    "hj_expand",
]
