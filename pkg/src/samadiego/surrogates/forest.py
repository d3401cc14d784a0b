"""Random-forest regression with tree-spread uncertainty."""

import math

import numpy as np
from sklearn.ensemble import RandomForestRegressor

from .base import FittedSurrogate, Infeasible, SurrogateConfig

N_TREES = 100
MIN_LEAF = 2


class ForestModel(FittedSurrogate):
    """Mean of the trees' predictions; uncertainty is their standard deviation."""

    def __init__(self, config, levels, forest: RandomForestRegressor):
        super().__init__(config, levels)
        self.forest = forest
        self._trees = [est.tree_ for est in forest.estimators_]

    def tree_predictions(self, X) -> np.ndarray:
        Z = np.ascontiguousarray(self.scale(X), dtype=np.float32)
        return np.stack([t.predict(Z).reshape(len(Z), -1)[:, 0] for t in self._trees])

    def predict(self, X):
        return self.tree_predictions(X).mean(0)

    def predict_with_uncertainty(self, X):
        P = self.tree_predictions(X)
        return P.mean(0), P.std(0)


def fit_forest(config: SurrogateConfig, X, y, levels, seed: int = 0):
    Z = np.asarray(X, dtype=float) / (levels - 1)
    m = Z.shape[1]
    rf = RandomForestRegressor(
        n_estimators=N_TREES,
        max_features=math.ceil(m / 3),
        min_samples_leaf=MIN_LEAF,
        bootstrap=True,
        random_state=seed,
    )
    try:
        rf.fit(Z, y)
    except ValueError as exc:
        return Infeasible(config, str(exc))
    return ForestModel(config, levels, rf)
