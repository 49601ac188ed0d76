"""Error probabilities for discriminating N copies of two qubit mixed states:
collective, PPT-bounded LOCC, repeated and adaptive local strategies."""

__version__ = "0.1.0"

from .errors import DomainError, ResourceError
from .qubit import StatePair, make_pair

__all__ = ["DomainError", "ResourceError", "StatePair", "make_pair", "__version__"]
