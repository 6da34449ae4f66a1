"""Exceptions raised by chainsemi.

Each error also derives from the builtin exception a caller would
naturally catch, so ``except ValueError`` keeps working for bad input.
"""


class ChainsemiError(Exception):
    """Base class for all errors raised by this package."""


class SizeMismatchError(ChainsemiError, ValueError):
    """Two maps on chains of different sizes were combined."""


class DomainError(ChainsemiError, ValueError):
    """An operation was called outside the class it is defined on.

    This is also raised for points that do not lie on the chain.
    """


class ParameterError(ChainsemiError, ValueError):
    """A family or descriptor parameter is out of range."""


class RegimeError(ChainsemiError, ValueError):
    """The requested label does not exist for this (n, r) regime."""


class ResourceCapError(ChainsemiError, RuntimeError):
    """The brute-force cap or the closure element cap was exceeded."""


class InconsistencyError(ChainsemiError, RuntimeError):
    """An internal invariant failed.

    This should never happen: it means either a bug, or a mathematical
    claim that does not hold at the size being checked.
    """


class CheckFailedError(ChainsemiError, AssertionError):
    """A verification check found a statement to be false."""
