"""Exception types shared across the library.

The CLI maps these onto its exit-code contract: configuration and domain
problems exit with code 2, coverage shortfalls and numerical
non-convergence with code 3.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CoverageError(ValueError):
    """A cached table does not cover a requested lag; message names the lag."""


class ConvergenceError(RuntimeError):
    """An adaptive scheme exhausted its budget before reaching tolerance."""
