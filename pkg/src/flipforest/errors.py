"""Exceptions shared across modules."""


class BudgetExceeded(RuntimeError):
    """A configured search or enumeration cap was hit."""


class InvariantViolation(AssertionError):
    """A structural guarantee the algorithms rely on failed to hold."""
