"""Ergodic capacity of underlay cognitive dual-hop AF relaying over
generalized-K fading."""
from .errors import (DomainError, IllConditionedError, NonConvergenceError,
                     ParameterError, UnsupportedClassError)

__version__ = "0.1.0"

__all__ = ["DomainError", "IllConditionedError", "NonConvergenceError",
           "ParameterError", "UnsupportedClassError", "__version__"]
