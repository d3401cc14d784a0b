"""Budgeted, logged access to a problem's real objective."""

from __future__ import annotations

import time
from typing import Optional

import numpy as np

from .problems import Problem
from .types import RunLog, to_minimize


class BudgetExhausted(RuntimeError):
    """Raised when an optimizer asks for more real evaluations than allowed."""


class Tracker:
    """Counts, times and logs every real evaluation of ``problem``.

    With ``stop_at_optimum`` the tracker reports ``done`` as soon as the
    known optimum is hit, letting benchmark runs end early; by default a run
    always spends the whole budget.
    """

    def __init__(self, problem: Problem, budget: int, log: RunLog, stop_at_optimum: bool = False):
        if budget < 1:
            raise ValueError("budget must be positive")
        self.problem = problem
        self.budget = budget
        self.log = log
        self.stop_at_optimum = stop_at_optimum
        self.hit = False
        log.notes["budget_limit"] = budget
        self._start = time.perf_counter()

    @property
    def used(self) -> int:
        return len(self.log)

    @property
    def left(self) -> int:
        return self.budget - self.used

    @property
    def done(self) -> bool:
        return self.left <= 0 or (self.stop_at_optimum and self.hit)

    def __call__(self, d, model_id: Optional[str] = None) -> float:
        """Evaluate one design; returns the raw objective (problem sense)."""
        if self.left <= 0:
            raise BudgetExhausted(f"budget of {self.budget} evaluations is spent")
        y = self.problem.evaluate(d)
        self.log.record(d, y, model_id, time.perf_counter() - self._start)
        self.hit = self.hit or self.problem.is_optimal(y)
        return y

    def minimize_value(self, d, model_id: Optional[str] = None) -> float:
        return to_minimize(self(d, model_id), self.problem.sense)

    def batch(self, X, model_id: Optional[str] = None) -> np.ndarray:
        """Evaluate rows in order until the budget (or an early stop) ends."""
        out = []
        for d in np.atleast_2d(X):
            if self.done:
                break
            out.append(self(d, model_id))
        return np.array(out)


def new_log(problem: Problem, algorithm: str, seed: int, infill: Optional[str] = None) -> RunLog:
    return RunLog(problem.name, problem.sense, seed, algorithm, infill, problem.known_optimum)
