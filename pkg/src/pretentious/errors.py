"""Exception hierarchy shared by the library and the CLI.

The CLI maps :class:`PreconditionError` (and its subclasses) to exit status 1
and :class:`ResourceError` to exit status 2.
"""


class PretentiousError(Exception):
    pass


class PreconditionError(PretentiousError, ValueError):
    """An operation was called outside its documented domain."""


class DomainError(PreconditionError):
    pass


class CardinalityError(PreconditionError):
    """A density was requested for a prime set with divergent reciprocal sum."""


class PartitionError(PreconditionError):
    """Prime classes of a finitely generated function do not partition the primes."""


class SchemaError(PreconditionError):
    """A JSON document does not match the expected schema."""


class ResourceError(PretentiousError, MemoryError):
    """A configured size bound (sieve limit, character modulus bound) was exceeded."""
