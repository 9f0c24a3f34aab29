"""Base exception for everything this package raises on purpose."""


class ExecdescError(Exception):
    """Common base so callers can catch tool errors without catching bugs."""
