"""Run configuration, size budgets and the shared exception types."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass

DEFAULT_NNZ_BUDGET = 10**8
BUDGET_ENV = "KRONSPAN_NNZ_BUDGET"


class BudgetExceeded(RuntimeError):
    """A construction would exceed the configured nonzero budget."""


class VerificationFailed(RuntimeError):
    """An identity or certificate check came out false."""


def resolve_budget(budget: int | None = None) -> int:
    if budget is not None:
        if budget < 1:
            raise ValueError("budget must be positive")
        return budget
    env = os.environ.get(BUDGET_ENV)
    return int(env) if env else DEFAULT_NNZ_BUDGET


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI report needs for replay."""

    field: str = str(2**61 - 1)
    seed: int | None = None
    nnz_budget: int = DEFAULT_NNZ_BUDGET
    precision: int = 30
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.nnz_budget < 1:
            raise ValueError("nnz_budget must be positive")
        if self.precision < 1:
            raise ValueError("precision must be positive")

    def to_dict(self) -> dict:
        return asdict(self)
