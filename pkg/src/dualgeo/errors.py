"""Shared error types for numerical failure modes."""


class NonConvergenceError(RuntimeError):
    """An iterative or adaptive numerical procedure failed to converge."""
