"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2,
InvariantError -> 3, ConvergenceError -> 4.
"""


class KickedGasError(Exception):
    """Base class for all package errors."""


class ConfigError(KickedGasError):
    """Invalid or incomplete configuration / parameters."""


class InvariantError(KickedGasError):
    """A numerical invariant (norm, Hermiticity, positivity, ...) was violated."""


class ConvergenceError(KickedGasError):
    """An iterative procedure failed to reach its tolerance."""
