"""Shared exception types."""


class BudgetError(RuntimeError):
    """An enumeration or construction would exceed its configured budget."""


class PreconditionError(ValueError):
    """An operation was applied to an input that violates its precondition."""
