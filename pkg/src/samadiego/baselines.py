"""Model-free reference optimizers, all logged as ``RunLog``.

* ``one_plus_lambda_ea``: (1+lambda) EA with static standard bit mutation.
* ``one_plus_ll_ga``: self-adjusting (1+(lambda,lambda)) GA.
* ``mies_baseline``: the mixed-integer ES run directly on the real objective.
* ``random_search_baseline``: uniform random designs.
"""

from __future__ import annotations

import numpy as np

from .mies import mies_optimize
from .problems import Problem
from .tracking import Tracker, new_log
from .types import RunLog

EA_LAMBDA = 10
GA_LAMBDA_MAX = 25
GA_UPDATE_FACTOR = 1.5


def _require_binary(problem: Problem):
    if not problem.space.is_binary:
        raise ValueError(f"{problem.name} is not a pseudo-Boolean problem")


def _positive_binomial(rng: np.random.Generator, n: int, p: float) -> int:
    """Binomial draw conditioned on being positive (resampling)."""
    while True:
        k = int(rng.binomial(n, p))
        if k > 0:
            return k


def _flip(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    y = x.copy()
    idx = rng.choice(len(x), size=k, replace=False)
    y[idx] = 1 - y[idx]
    return y


def one_plus_lambda_ea(problem: Problem, budget: int, lam: int = EA_LAMBDA, seed: int = 0,
                       stop_at_optimum: bool = False) -> RunLog:
    """Elitist (1+lambda) EA; each offspring flips ``l ~ Bin>0(n, 1/n)`` bits.

    Ties between parent and best offspring go to the offspring.
    """
    _require_binary(problem)
    rng = np.random.default_rng(seed)
    log = new_log(problem, "ea-1p10" if lam == EA_LAMBDA else f"ea-1p{lam}", seed)
    f = Tracker(problem, budget, log, stop_at_optimum)
    n = problem.dim
    x = problem.space.random(rng)
    fx = f.minimize_value(x)
    while not f.done:
        best, fbest = None, np.inf
        for _ in range(lam):
            if f.done:
                break
            y = _flip(x, _positive_binomial(rng, n, 1.0 / n), rng)
            fy = f.minimize_value(y)
            if fy < fbest:
                best, fbest = y, fy
        if best is not None and fbest <= fx:
            x, fx = best, fbest
    return log


def one_plus_ll_ga(problem: Problem, budget: int, lam: int = GA_LAMBDA_MAX, seed: int = 0,
                   stop_at_optimum: bool = False, trace_lambda: list | None = None) -> RunLog:
    """Self-adjusting (1+(lambda,lambda)) GA with the one-fifth success rule.

    Mutation strength ``l ~ Bin>0(n, lambda/n)``, crossover bias ``1/lambda``,
    ``lambda`` divided by 3/2 on success and multiplied by (3/2)^(1/4)
    otherwise, kept in ``[1, lam]``. Crossover offspring equal to the parent
    are not evaluated; offspring equal to the mutation winner reuse its value.
    """
    _require_binary(problem)
    rng = np.random.default_rng(seed)
    log = new_log(problem, "ga-1pll", seed)
    f = Tracker(problem, budget, log, stop_at_optimum)
    n = problem.dim
    x = problem.space.random(rng)
    fx = f.minimize_value(x)
    size = 1.0
    while not f.done:
        count = max(1, int(round(size)))
        ell = _positive_binomial(rng, n, min(size / n, 1.0))
        xm, fxm = None, np.inf
        for _ in range(count):
            if f.done:
                break
            y = _flip(x, ell, rng)
            fy = f.minimize_value(y)
            if fy < fxm:
                xm, fxm = y, fy
        if xm is None:
            break
        yc, fyc = xm, fxm
        diff = np.flatnonzero(xm != x)
        for _ in range(count):
            if f.done:
                break
            take = diff[rng.random(len(diff)) < 1.0 / size]
            if len(take) == 0:
                continue
            y = x.copy()
            y[take] = xm[take]
            fy = fxm if len(take) == len(diff) else f.minimize_value(y)
            if fy < fyc:
                yc, fyc = y, fy
        if fyc < fx:
            size = max(size / GA_UPDATE_FACTOR, 1.0)
        else:
            size = min(size * GA_UPDATE_FACTOR ** 0.25, float(lam))
        if trace_lambda is not None:
            trace_lambda.append(size)
        if fyc <= fx:
            x, fx = yc, fyc
    return log


def mies_baseline(problem: Problem, budget: int, seed: int = 0, stop_at_optimum: bool = False) -> RunLog:
    """The evolution strategy on the real objective, one logged call per design."""
    log = new_log(problem, "mies", seed)
    f = Tracker(problem, budget, log, stop_at_optimum)

    def score(X):
        values = [-f.minimize_value(d) if not f.done else -np.inf for d in X]
        return np.array(values)

    mies_optimize(score, problem.space, budget, seed)
    return log


def random_search_baseline(problem: Problem, budget: int, seed: int = 0,
                           stop_at_optimum: bool = False) -> RunLog:
    rng = np.random.default_rng(seed)
    log = new_log(problem, "random", seed)
    f = Tracker(problem, budget, log, stop_at_optimum)
    while not f.done:
        f(problem.space.random(rng))
    return log


__all__ = ["one_plus_lambda_ea", "one_plus_ll_ga", "mies_baseline", "random_search_baseline"]
