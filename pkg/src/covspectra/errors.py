"""Shared exception types.

ValueError is used for domain/configuration errors (CLI exit code 2);
NumericalError marks convergence or stability failures (CLI exit code 1).
"""


class NumericalError(RuntimeError):
    """An iteration failed to converge or a stability contract was violated."""
