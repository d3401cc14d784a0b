"""Mixed-integer evolution strategy over binary and ordinal variables.

A (mu, lambda) comma strategy with self-adaptive mutation: every individual
carries one step size per ordinal variable and one bit-flip probability shared
by all binary variables. The single best non-tabu design seen is archived and
returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from .types import SearchSpace, design_key

MU = 4
LAMBDA = 28
MIN_STEP = 1e-4
INITIAL_STEP_FRACTION = 0.1

Score = Callable[[np.ndarray], np.ndarray]


def geometric_parameter(step):
    """Success probability whose geometric-difference has mean absolute value ``step``."""
    step = np.asarray(step, dtype=float)
    return 1.0 - step / (1.0 + np.sqrt(1.0 + step * step))


def reflect(values, levels):
    """Periodic reflection of integers into ``[0, levels - 1]``."""
    values = np.asarray(values, dtype=np.int64)
    top = np.asarray(levels, dtype=np.int64) - 1
    period = 2 * top
    v = np.mod(values, period)
    return np.where(v > top, period - v, v)


def geometric_difference(step, rng: np.random.Generator):
    """Symmetric integer jumps ``G1 - G2`` with ``E|G1 - G2| = step``."""
    p = geometric_parameter(step)
    # numpy counts trials to the first success, so subtract one to get failures
    return (rng.geometric(p) - 1) - (rng.geometric(p) - 1)


def mutate_ordinal(value: int, step: float, levels: int, rng: np.random.Generator) -> int:
    """Jump an ordinal level by a geometric difference and reflect into range."""
    if not 0 <= value < levels:
        raise ValueError(f"level {value} out of range [0, {levels})")
    return int(reflect(value + geometric_difference(step, rng), levels))


@dataclass
class Population:
    designs: np.ndarray   # (k, dim) level indices
    steps: np.ndarray     # (k, n_ordinal) step sizes
    flip: np.ndarray      # (k,) bit-flip probability of the binary block
    scores: np.ndarray    # (k,)


@dataclass
class MiesResult:
    design: np.ndarray
    score: float
    evaluations: int
    trace: list[float]    # best score seen after each generation (tabu or not)


class _Budget:
    def __init__(self, score: Score, limit: int):
        self.score = score
        self.limit = limit
        self.used = 0

    @property
    def left(self) -> int:
        return self.limit - self.used

    def __call__(self, X: np.ndarray) -> np.ndarray:
        if len(X) > self.left:
            raise RuntimeError("score budget exceeded")
        self.used += len(X)
        out = np.asarray(self.score(X), dtype=float).reshape(len(X))
        # a NaN score must never win a comparison
        return np.where(np.isnan(out), -np.inf, out)


class _Archive:
    """Best non-tabu design seen so far."""

    def __init__(self, tabu: set[bytes]):
        self.tabu = tabu
        self.design: Optional[np.ndarray] = None
        self.score = -np.inf
        self.best_any = -np.inf

    def offer(self, X: np.ndarray, scores: np.ndarray):
        self.best_any = max(self.best_any, float(scores.max()))
        for i in np.argsort(-scores, kind="stable"):
            if self.design is not None and scores[i] <= self.score:
                return
            if design_key(X[i]) not in self.tabu:
                self.design, self.score = X[i].copy(), float(scores[i])
                return


def mies_optimize(
    score: Score,
    space: SearchSpace,
    eval_budget: int,
    seed: int,
    tabu: Iterable = (),
    init: Optional[np.ndarray] = None,
    mu: int = MU,
    lam: int = LAMBDA,
) -> MiesResult:
    """Maximize ``score`` over ``space`` with at most ``eval_budget`` score calls.

    ``score`` maps a batch of designs ``(k, dim)`` to ``k`` values. ``tabu``
    holds designs that must not be returned; the search itself may visit them.
    ``init`` optionally supplies up to ``mu`` starting parents (the rest are
    uniform random).
    """
    if eval_budget < mu:
        raise ValueError(f"eval_budget {eval_budget} < population size {mu}")
    tabu_keys = {design_key(d) for d in tabu}
    if len(tabu_keys) >= space.cardinality():
        raise ValueError("every design in the search space is tabu")
    rng = np.random.default_rng(seed)
    evaluate = _Budget(score, eval_budget)
    archive = _Archive(tabu_keys)

    levels = space.levels
    binary = space.binary_mask
    ordinal = ~binary
    n_bin, n_ord = int(binary.sum()), int(ordinal.sum())
    flip_lo, flip_hi = (1.0 / (3 * n_bin), 0.5) if n_bin else (0.0, 0.0)
    tau_step = 1.0 / math.sqrt(2 * n_ord) if n_ord else 0.0
    tau_step_global = 1.0 / math.sqrt(2 * math.sqrt(n_ord)) if n_ord else 0.0
    tau_flip = 1.0 / math.sqrt(2 * n_bin) if n_bin else 0.0
    max_step = (levels[ordinal] - 1).astype(float)

    X0 = space.random(rng, mu)
    if init is not None and len(init):
        init = np.asarray(init, dtype=np.int64)[:mu]
        X0[: len(init)] = init
    pop = Population(
        designs=X0,
        steps=np.tile(np.maximum(INITIAL_STEP_FRACTION * max_step, MIN_STEP), (mu, 1)),
        flip=np.full(mu, max(1.0 / n_bin, flip_lo) if n_bin else 0.0),
        scores=evaluate(X0),
    )
    archive.offer(pop.designs, pop.scores)
    trace = [archive.best_any]

    while evaluate.left > 0:
        k = min(lam, evaluate.left)
        pa = rng.integers(0, len(pop.scores), k)
        pb = rng.integers(0, len(pop.scores), k)
        pick = rng.random((k, space.dim)) < 0.5
        X = np.where(pick, pop.designs[pa], pop.designs[pb])

        steps = 0.5 * (pop.steps[pa] + pop.steps[pb])
        if n_ord:
            steps = steps * np.exp(tau_step_global * rng.standard_normal((k, 1))
                                   + tau_step * rng.standard_normal((k, n_ord)))
            steps = np.clip(steps, MIN_STEP, np.maximum(max_step, MIN_STEP))
            X[:, ordinal] = reflect(X[:, ordinal] + geometric_difference(steps, rng), levels[ordinal])

        flip = 0.5 * (pop.flip[pa] + pop.flip[pb])
        if n_bin:
            odds = (1.0 - flip) / flip * np.exp(-tau_flip * rng.standard_normal(k))
            flip = np.clip(1.0 / (1.0 + odds), flip_lo, flip_hi)
            flips = rng.random((k, n_bin)) < flip[:, None]
            X[:, binary] = np.where(flips, 1 - X[:, binary], X[:, binary])

        scores = evaluate(X)
        archive.offer(X, scores)
        trace.append(archive.best_any)
        keep = np.argsort(-scores, kind="stable")[:mu]
        pop = Population(X[keep], steps[keep], flip[keep], scores[keep])

    design = archive.design
    if design is None:
        design = _random_free_design(space, tabu_keys, rng)
    return MiesResult(design, archive.score, evaluate.used, trace)


def _random_free_design(space: SearchSpace, tabu: set[bytes], rng) -> np.ndarray:
    """Any non-tabu design, when the search only ever met tabu ones."""
    for _ in range(10_000):
        d = space.random(rng)
        if design_key(d) not in tabu:
            return d
    from .problems import all_designs

    for d in all_designs(space):
        if design_key(d) not in tabu:
            return np.array(d, dtype=np.int64)
    raise ValueError("every design in the search space is tabu")
