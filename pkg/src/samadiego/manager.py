"""Surrogate-assisted optimization with online selection from a model pool.

One run: a Latin hypercube initial design, a one-off verification stage that
keeps the ``P`` best-validating model configurations, then a loop that refits
the pool on the standardized archive, optimizes the infill criterion of the
currently selected model with MIES, evaluates the proposal and hands the
selection to whichever pool model predicted that new value best.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import surrogates
from .infill import InfillSpec, infill_score, resolve
from .mies import mies_optimize
from .problems import Problem
from .sampling import lhs_sample
from .surrogates import FittedSurrogate, SurrogateConfig
from .tracking import Tracker, new_log
from .types import Infill, RunConfig, RunLog, SearchSpace

TRAIN_FRACTION = 0.7
TIE_TOLERANCE = 1e-12
SIGMA_FLOOR = 1e-12


@dataclass(frozen=True)
class Standardization:
    mean: float
    std: float

    def transform(self, y):
        return (np.asarray(y, dtype=float) - self.mean) / self.std


def standardize(Y: Sequence[float]) -> tuple[np.ndarray, Standardization]:
    """Zero-mean, unit population-std scaling; a constant archive maps to zeros.

    >>> standardize([0.0, 10.0])[0].tolist()
    [-1.0, 1.0]
    """
    Y = np.asarray(Y, dtype=float)
    if Y.size < 2:
        raise ValueError("need at least 2 values to standardize")
    mean = float(Y.mean())
    std = float(Y.std())
    if std < SIGMA_FLOOR:
        std = 1.0
    s = Standardization(mean, std)
    return s.transform(Y), s


@dataclass
class PoolEntry:
    config: SurrogateConfig
    r2: float
    fit_seconds: float


@dataclass
class ModelPool:
    """Verified configurations, best validation score first."""

    entries: list[PoolEntry]
    rejected: dict[str, str] = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    @property
    def configs(self) -> list[SurrogateConfig]:
        return [e.config for e in self.entries]

    @property
    def ids(self) -> list[str]:
        return [e.config.id for e in self.entries]


def _validation_score(y_true, y_pred) -> float:
    try:
        return surrogates.r2_score(y_true, y_pred)
    except ValueError:
        # R^2 is undefined on a constant test split; rank by negated MSE instead
        return -float(np.mean((np.asarray(y_true) - np.asarray(y_pred)) ** 2))


def verify_models(configs: Sequence[SurrogateConfig], X, Y, space: SearchSpace, parallel: int = 7,
                  time_limit: float = 30.0, seed: int = 0) -> ModelPool:
    """Fit every config on a seeded 70 % split and keep the ``parallel`` best.

    Infeasible fits, fits slower than ``time_limit`` seconds and fits with
    non-finite test predictions are dropped; survivors are ranked by
    held-out R^2 (ties keep ``configs`` order).
    """
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=float)
    n = len(X)
    if n < 4:
        raise ValueError("verification needs at least 4 evaluated designs")
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    n_train = min(int(round(TRAIN_FRACTION * n)), n - 1)
    tr, te = order[:n_train], order[n_train:]
    Ytr, stats = standardize(Y[tr])
    Yte = stats.transform(Y[te])

    entries, rejected = [], {}
    for cfg in configs:
        t0 = time.perf_counter()
        try:
            model = surrogates.fit(cfg, X[tr], Ytr, space, seed=seed)
        except ValueError as exc:
            rejected[cfg.id] = str(exc)
            continue
        took = time.perf_counter() - t0
        if not model:
            rejected[cfg.id] = model.reason
            continue
        if took > time_limit:
            rejected[cfg.id] = f"fit took {took:.1f}s > {time_limit}s"
            continue
        pred = model.predict(X[te])
        if not np.isfinite(pred).all():
            rejected[cfg.id] = "non-finite predictions"
            continue
        entries.append(PoolEntry(cfg, _validation_score(Yte, pred), took))
    if not entries:
        raise RuntimeError("no surrogate configuration passed verification")
    entries.sort(key=lambda e: -e.r2)
    return ModelPool(entries[:parallel], rejected)


def rank_models(predictions: Sequence[float], y_new: float) -> int:
    """Index of the prediction closest to ``y_new``; ties go to the lower index.

    Callers pass predictions in verification-rank order, so a tie is won by
    the better-verified model.

    >>> rank_models([0.5, 1.2, 0.9], 1.0)
    2
    """
    err = np.abs(np.asarray(predictions, dtype=float) - y_new)
    if not len(err):
        raise ValueError("empty model pool")
    err = np.where(np.isnan(err), np.inf, err)
    best = float(err.min())
    return int(np.flatnonzero(err <= best + TIE_TOLERANCE)[0])


def default_n_init(space: SearchSpace, budget: int) -> int:
    """Dimensionality for pseudo-Boolean spaces, 10 % of the budget otherwise."""
    k = space.dim if space.is_binary else math.ceil(0.1 * budget)
    return max(4, min(k, budget - 1))


def _refit(pool: ModelPool, X, y, space, seed, hints, executor) -> list:
    def job(cfg):
        return surrogates.fit(cfg, X, y, space, seed=seed, hint=hints.get(cfg.id))

    if executor is None:
        return [job(c) for c in pool.configs]
    return list(executor.map(job, pool.configs))


def samadiego_run(problem: Problem, cfg: RunConfig, configs: Optional[Sequence[SurrogateConfig]] = None,
                  stop_at_optimum: bool = False) -> RunLog:
    """One full optimization run; returns its per-evaluation log.

    Exactly ``cfg.budget`` real evaluations are spent, unless
    ``stop_at_optimum`` ends the run at the first hit of the known optimum.
    """
    space = problem.space
    algo = f"sama-diego-{cfg.infill.value}"
    runlog = new_log(problem, algo, cfg.seed, cfg.infill.value)
    f = Tracker(problem, cfg.budget, runlog, stop_at_optimum)
    rng = np.random.default_rng(cfg.seed)

    def sub_seed() -> int:
        return int(rng.integers(2**31))

    X = lhs_sample(space, cfg.n_init, sub_seed())
    Y = [f.minimize_value(d, model_id="lhs") for d in X]
    if f.done:
        return runlog

    pool = verify_models(configs or surrogates.default_pool(), X, Y, space,
                         cfg.parallel, cfg.time_limit, seed=sub_seed())
    runlog.notes["pool"] = pool.ids
    runlog.notes["pool_r2"] = [round(e.r2, 6) for e in pool.entries]
    ranking = list(range(len(pool)))   # pool indices, most trusted first
    hints: dict[str, dict] = {}
    fallbacks = {"ei_to_pv": 0, "infeasible_refit": 0, "selected_refit_failed": 0}
    tabu = {tuple(d) for d in X}
    selection: list[dict] = []   # per iteration: what the ranking saw and chose
    runlog.notes["selection"] = selection
    X = [np.asarray(d) for d in X]

    executor = ThreadPoolExecutor(cfg.parallel) if cfg.parallel > 1 else None
    try:
        while not f.done:
            Ya = np.asarray(Y)
            Ys, stats = standardize(Ya)
            Xa = np.vstack(X)
            fits_seed = sub_seed()
            fits = _refit(pool, Xa, Ys, space, fits_seed, hints, executor)
            for cfg_i, m in zip(pool.configs, fits):
                if m:
                    hints[cfg_i.id] = m.hyper
                else:
                    fallbacks["infeasible_refit"] += 1

            live = [i for i in ranking if fits[i]]
            if not live:
                raise RuntimeError("every pool model failed to refit")
            if live[0] != ranking[0]:
                fallbacks["selected_refit_failed"] += 1
            model: FittedSurrogate = fits[live[0]]

            spec = InfillSpec(cfg.infill, float(Ys.min()) if cfg.infill is Infill.EI else None)
            spec, fell_back = resolve(spec, model)
            fallbacks["ei_to_pv"] += fell_back

            def score(batch, model=model, spec=spec):
                return infill_score(spec, model, batch)

            with np.errstate(all="ignore"):
                found = mies_optimize(score, space, cfg.search_budget, sub_seed(), tabu=tabu)
            x_new = found.design
            y_new = f.minimize_value(x_new, model_id=model.id)
            y_new_std = float(stats.transform(y_new))

            # the new point decides the next model among this iteration's fits;
            # the rest stay ordered by error as fallbacks
            fitted = sorted(live)
            preds = np.array([float(fits[i].predict(x_new[None, :])[0]) for i in fitted])
            winner = fitted[rank_models(preds, y_new_std)]
            err = np.abs(preds - y_new_std)
            rest = [i for _, i in sorted(zip(err, fitted)) if i != winner]
            ranking = [winner] + rest + [i for i in ranking if not fits[i]]
            selection.append({"candidates": [pool.ids[i] for i in fitted], "predictions": preds.tolist(),
                              "y_std": y_new_std, "winner": pool.ids[winner]})

            X.append(np.asarray(x_new))
            Y.append(y_new)
            tabu.add(tuple(int(v) for v in x_new))
    finally:
        if executor is not None:
            executor.shutdown()
    runlog.notes["fallbacks"] = fallbacks
    return runlog
