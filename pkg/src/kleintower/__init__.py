"""Klein étale coverings of genus-3 hyperelliptic curves.

Combinatorics of the 2-torsion subgroups, symbolic construction of the
(Z/2)^3 covering tower over P^1, and exact point-count verification of the
Jacobian decompositions over finite fields.
"""

__version__ = "0.1.0"

from .errors import (
    ConsistencyError,
    CountInconsistencyError,
    InvalidSubsetError,
    NotACurveError,
    ParameterError,
)

__all__ = [
    "__version__",
    "ConsistencyError",
    "CountInconsistencyError",
    "InvalidSubsetError",
    "NotACurveError",
    "ParameterError",
]
