"""Epsilon-SVR surrogates (no predictive uncertainty)."""

import numpy as np
from sklearn.svm import SVR

from .base import FittedSurrogate, Infeasible, SurrogateConfig

SVR_KERNELS = ("linear", "rbf", "sigmoid", "poly2", "poly3", "poly5")
C = 1.0
EPSILON = 0.1


class SVRModel(FittedSurrogate):
    supports_uncertainty = False

    def __init__(self, config, levels, svr: SVR):
        super().__init__(config, levels)
        self.svr = svr

    def predict(self, X):
        return self.svr.predict(self.scale(X))


def make_svr(kernel: str, m: int) -> SVR:
    gamma = 1.0 / m
    if kernel.startswith("poly"):
        return SVR(kernel="poly", degree=int(kernel[4:]), gamma=gamma, C=C, epsilon=EPSILON)
    if kernel not in ("linear", "rbf", "sigmoid"):
        raise ValueError(f"unknown SVR kernel {kernel!r}")
    return SVR(kernel=kernel, gamma=gamma, C=C, epsilon=EPSILON)


def fit_svr(config: SurrogateConfig, X, y, levels):
    Z = np.asarray(X, dtype=float) / (levels - 1)
    svr = make_svr(config.kernel, Z.shape[1])
    try:
        svr.fit(Z, y)
    except ValueError as exc:
        return Infeasible(config, str(exc))
    if not np.isfinite(svr.dual_coef_).all():
        return Infeasible(config, "non-finite dual coefficients")
    return SVRModel(config, levels, svr)
