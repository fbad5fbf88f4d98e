"""Enumeration budgets shared by the exact evaluators and oracles."""

from __future__ import annotations

DEFAULT_BUDGET = 10_000_000


class BudgetExceededError(RuntimeError):
    """Raised when an exact enumeration would exceed its branch budget.

    Callers should fall back to Monte Carlo estimation (``--mc`` on the
    command line) or raise the budget explicitly.
    """

    def __init__(self, required: int, budget: int, what: str = "enumeration"):
        self.required = required
        self.budget = budget
        super().__init__(
            f"{what} needs {required} branches but the budget is {budget}; "
            f"use Monte Carlo estimation (--mc/--trials/--seed) or raise the budget"
        )


def check_budget(required: int, budget: int, what: str = "enumeration") -> None:
    if required > budget:
        raise BudgetExceededError(required, budget, what)
