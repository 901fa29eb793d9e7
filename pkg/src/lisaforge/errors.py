class BudgetExceeded(RuntimeError):
    """A configured resource cap was hit; the instance is too large."""


class StateBudgetExceeded(BudgetExceeded):
    pass


class NodeBudgetExceeded(BudgetExceeded):
    pass
