"""Exception taxonomy.

The CLI maps these onto exit codes: schema problems exit 1, mathematical
precondition failures exit 2, tolerance pathologies exit 3.
"""


class SchemaError(ValueError):
    """Malformed input: wrong JSON shape, inconsistent dimensions, bad flags."""


class PreconditionError(ValueError):
    """Input is well-formed but violates a mathematical precondition
    (non-member measure, non-admissible perturbation, near-unitary Moebius
    center, ...)."""


class DepthExceededError(RuntimeError):
    """Decomposition recursion exceeded its depth budget; indicates a
    tolerance pathology rather than a failure of the underlying theory."""
