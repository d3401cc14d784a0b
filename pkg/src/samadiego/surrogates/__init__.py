"""The candidate model pool behind one fit / predict contract.

>>> [c.id for c in default_pool()][:2]
['rbf:linear', 'rbf:cubic']
"""

from __future__ import annotations

import numpy as np

from ..types import SearchSpace
from .base import (
    FittedSurrogate,
    Infeasible,
    SurrogateConfig,
    UnsupportedError,
    r2_score,
)
from .forest import ForestModel, fit_forest
from .kriging import CORRELATIONS, TRENDS, KrigingModel, fit_kriging, kriging_corr
from .rbf import RBF_KERNELS, RBFModel, fit_rbf, rbf_phi
from .svr import SVR_KERNELS, SVRModel, fit_svr

__all__ = [
    "FittedSurrogate", "Infeasible", "SurrogateConfig", "UnsupportedError",
    "ForestModel", "KrigingModel", "RBFModel", "SVRModel",
    "default_pool", "fit", "predict", "predict_with_uncertainty",
    "rbf_phi", "kriging_corr", "r2_score",
]


def default_pool() -> list[SurrogateConfig]:
    """All 31 configurations: 9 RBF, 15 Kriging, 1 forest, 6 SVR."""
    pool = [SurrogateConfig("rbf", k) for k in RBF_KERNELS]
    pool += [SurrogateConfig("kriging", c, t) for c in CORRELATIONS for t in TRENDS]
    pool.append(SurrogateConfig("forest"))
    pool += [SurrogateConfig("svr", k) for k in SVR_KERNELS]
    return pool


def fit(config: SurrogateConfig, X, y, space: SearchSpace, *, seed: int = 0, hint: dict | None = None):
    """Train ``config`` on designs ``X`` and (standardized) targets ``y``.

    Returns a fitted model, or an ``Infeasible`` verdict when the numerics
    fail. ``hint`` may carry hyperparameters of an earlier fit of the same
    configuration (used to warm-start the Kriging length-scale search).
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.int64))
    y = np.asarray(y, dtype=float).ravel()
    if len(X) != len(y):
        raise ValueError(f"{len(X)} designs but {len(y)} targets")
    if len(X) < 2:
        raise ValueError("need at least 2 training points")
    levels = space.levels
    try:
        with np.errstate(all="ignore"):
            if config.family == "rbf":
                return fit_rbf(config, X, y, levels)
            if config.family == "kriging":
                theta0 = (hint or {}).get("theta")
                return fit_kriging(config, X, y, levels, space.binary_mask, theta0=theta0)
            if config.family == "forest":
                return fit_forest(config, X, y, levels, seed=seed)
            if config.family == "svr":
                return fit_svr(config, X, y, levels)
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        return Infeasible(config, f"{type(exc).__name__}: {exc}")
    raise ValueError(f"unknown model family {config.family!r}")


def _check(model: FittedSurrogate, x) -> np.ndarray:
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.integer) or x.shape[-1] != len(model.levels) \
            or (x < 0).any() or (x >= model.levels).any():
        raise ValueError(f"design(s) {x.tolist()} invalid for this model")
    return x


def predict(model: FittedSurrogate, x) -> float | np.ndarray:
    """Prediction for one design (float) or a batch (array), in standardized units."""
    x = _check(model, x)
    out = model.predict(np.atleast_2d(x))
    return float(out[0]) if x.ndim == 1 else out


def predict_with_uncertainty(model: FittedSurrogate, x):
    if not model.supports_uncertainty:
        raise UnsupportedError(f"{model.id} provides no uncertainty estimate")
    x = _check(model, x)
    mean, sd = model.predict_with_uncertainty(np.atleast_2d(x))
    if x.ndim == 1:
        return float(mean[0]), float(sd[0])
    return mean, sd
