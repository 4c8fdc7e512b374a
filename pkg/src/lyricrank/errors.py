"""Exception types shared across the pipeline.

ValidationError maps to CLI exit code 2, NumericalError to exit code 3.
"""


class ValidationError(ValueError):
    """Malformed input, contract violation, or inconsistent configuration."""


class NumericalError(ArithmeticError):
    """A numerical procedure failed to converge or produced a degenerate result."""
