"""Shared exception types."""


class DivisibilityError(ValueError):
    """Raised when item sizes do not form a divisibility chain."""


class BudgetExceededError(RuntimeError):
    """Raised when an exact solver or oracle would exceed its state budget."""


class UnsupportedCombinationError(ValueError):
    """Raised for update/query pairings that have no O(1) full-block rule."""
