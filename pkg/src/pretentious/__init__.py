"""Pretentious multiplicative functions and multiplicative dynamical systems.

Modules:

* ``arith``      sieve, factorization, Omega / Liouville, P-free numbers
* ``functions``  finitely generated completely multiplicative / additive functions
* ``pretend``    pretentious distance, Halasz mean values, character pretension
* ``characters`` Dirichlet characters, Gauss sums, classical identities
* ``systems``    mode-based rotations and skew products, averages, classification
* ``jointerg``   joint ergodicity decision, recurrence and configuration counts
* ``cli``        experiment runner
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CardinalityError,
    DomainError,
    PartitionError,
    PreconditionError,
    PretentiousError,
    ResourceError,
    SchemaError,
)
from .phase import HALF, ZERO, Irrational, Rational  # noqa: E402
from .arith import ALL_PRIMES, Default, Explicit, Residue  # noqa: E402
from .functions import FgAddFunction, FgMultFunction  # noqa: E402

__all__ = [
    "ALL_PRIMES",
    "CardinalityError",
    "Default",
    "DomainError",
    "Explicit",
    "FgAddFunction",
    "FgMultFunction",
    "HALF",
    "Irrational",
    "PartitionError",
    "PreconditionError",
    "PretentiousError",
    "Rational",
    "Residue",
    "ResourceError",
    "SchemaError",
    "ZERO",
]
