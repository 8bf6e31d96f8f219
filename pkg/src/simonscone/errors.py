"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input outside the documented domain of an operation."""


class ConvergenceError(RuntimeError):
    """A numerical procedure failed to reach its target."""
