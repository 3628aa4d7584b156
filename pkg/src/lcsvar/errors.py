class BudgetExceeded(ValueError):
    """An exact enumeration or tabulation would exceed its size budget."""


class InvariantViolation(AssertionError):
    """A checked inequality or identity failed."""
