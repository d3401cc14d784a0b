"""Universal Kriging on scaled level indices.

Correlations are product forms over coordinates with one shared inverse
length scale ``theta``, fitted by maximizing the concentrated log-likelihood
with a bounded scalar search in ``log10(theta)``.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg
from scipy.optimize import minimize_scalar

from .base import Distances, FittedSurrogate, Infeasible, SurrogateConfig, pairwise

CORRELATIONS = ("ou", "sqexp", "matern32", "matern52", "gower")
TRENDS = ("constant", "linear", "quadratic")

LOG10_THETA_BOUNDS = (-3.0, 2.0)
NUGGET = 100 * np.finfo(float).eps
NUGGET_RETRY = 1e-10


def kriging_corr(kind: str, x, x2, theta) -> float:
    """Correlation between two scaled points.

    ``theta`` is a positive scalar or one value per coordinate. For ``gower``
    the per-coordinate distances are taken as already range-normalized, which
    holds for scaled level indices (and is the 0/1 mismatch on binary data).
    """
    x = np.asarray(x, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), x.shape)
    if (theta <= 0).any():
        raise ValueError("theta must be positive")
    d = np.abs(x - x2)
    if kind == "ou":
        return float(np.exp(-(theta * d).sum()))
    if kind == "sqexp":
        return float(np.exp(-(theta * d * d).sum()))
    if kind == "matern32":
        a = np.sqrt(3.0) * theta * d
        return float(np.prod((1.0 + a) * np.exp(-a)))
    if kind == "matern52":
        a = np.sqrt(5.0) * theta * d
        return float(np.prod((1.0 + a + a * a / 3.0) * np.exp(-a)))
    if kind == "gower":
        return float(np.exp(-((np.sqrt(theta) * d).sum() ** 2) / d.size))
    raise ValueError(f"unknown correlation {kind!r}")


def correlation_matrix(kind: str, theta: float, D: Distances, m: int, binary: bool) -> np.ndarray:
    """Correlations for a whole distance table (shared scalar ``theta``)."""
    if kind == "ou":
        return np.exp(-theta * D.l1)
    if kind == "sqexp":
        return np.exp(-theta * D.sq)
    if kind == "gower":
        return np.exp(-theta * D.l1 * D.l1 / m)
    if kind in ("matern32", "matern52"):
        a = np.sqrt(3.0 if kind == "matern32" else 5.0) * theta

        def log_poly(t):
            return np.log1p(t) if kind == "matern32" else np.log1p(t + t * t / 3.0)

        if binary:
            return np.exp(D.l1 * (log_poly(a) - a))
        return np.exp(_sum_per_level(log_poly, a, D) - a * D.l1)
    raise ValueError(f"unknown correlation {kind!r}")


def _sum_per_level(fn, a: float, D: Distances) -> np.ndarray:
    """``sum_j fn(a * |delta_j|)`` via lookup tables over level differences."""
    steps = D.steps
    top = int(steps.max()) + 1
    out = np.zeros(steps.shape[1:])
    for j, s in enumerate(steps):
        out += np.take(fn(a * D.step[j] * np.arange(top)), s)
    return out


def trend_basis(Z: np.ndarray, trend: str, binary_mask: np.ndarray) -> np.ndarray:
    """Regression basis; squares of binary columns duplicate them and are dropped."""
    cols = [np.ones((len(Z), 1))]
    if trend in ("linear", "quadratic"):
        cols.append(Z)
    if trend == "quadratic":
        cols.append(Z[:, ~binary_mask] ** 2)
    elif trend not in ("constant", "linear"):
        raise ValueError(f"unknown trend {trend!r}")
    return np.hstack(cols)


class _GLS:
    """Cholesky-based generalized least squares state at one theta."""

    def __init__(self, R, F, y):
        n = len(y)
        self.L = linalg.cholesky(R, lower=True, check_finite=False)
        self.Ft = linalg.solve_triangular(self.L, F, lower=True, check_finite=False)
        yt = linalg.solve_triangular(self.L, y, lower=True, check_finite=False)
        self.Q, self.G = linalg.qr(self.Ft, mode="economic", check_finite=False)
        g = np.abs(np.diag(self.G))
        if g.min() < 1e-10 * g.max():
            raise linalg.LinAlgError("trend basis is rank deficient")
        self.beta = linalg.solve_triangular(self.G, self.Q.T @ yt, check_finite=False)
        rho = yt - self.Ft @ self.beta
        self.sigma2 = float(rho @ rho) / n
        self.gamma = linalg.solve_triangular(self.L.T, rho, check_finite=False)
        log_det = 2.0 * np.log(np.diag(self.L)).sum()
        self.nll = 0.5 * (n * np.log(max(self.sigma2, 1e-300)) + log_det)


class KrigingModel(FittedSurrogate):
    def __init__(self, config, levels, Zs, binary_mask, theta, gls: _GLS, nugget):
        super().__init__(config, levels)
        self.Zs = Zs
        self.binary_mask = binary_mask
        self.binary = bool(binary_mask.all())
        self.theta = theta
        self.gls = gls
        self.hyper = {"theta": theta, "nugget": nugget}

    def _cross(self, Z):
        kind = self.config.kernel
        per_dim = kind.startswith("matern") and not self.binary
        D = pairwise(Z, self.Zs, self.binary, self.levels, per_dim=per_dim)
        return correlation_matrix(kind, self.theta, D, Z.shape[1], self.binary)

    def predict(self, X):
        Z = self.scale(X)
        f = trend_basis(Z, self.config.trend, self.binary_mask)
        return f @ self.gls.beta + self._cross(Z) @ self.gls.gamma

    def predict_with_uncertainty(self, X):
        Z = self.scale(X)
        f = trend_basis(Z, self.config.trend, self.binary_mask)
        r = self._cross(Z)
        g = self.gls
        mean = f @ g.beta + r @ g.gamma
        rt = linalg.solve_triangular(g.L, r.T, lower=True, check_finite=False)
        u = linalg.solve_triangular(g.G.T, g.Ft.T @ rt - f.T, lower=True, check_finite=False)
        mse = g.sigma2 * (1.0 - (rt * rt).sum(0) + (u * u).sum(0))
        return mean, np.sqrt(np.maximum(mse, 0.0))


def fit_kriging(config: SurrogateConfig, X, y, levels, binary_mask, theta0=None):
    kind, trend = config.kernel, config.trend
    if kind not in CORRELATIONS:
        raise ValueError(f"unknown correlation {kind!r}")
    Zs = np.asarray(X, dtype=float) / (levels - 1)
    n, m = Zs.shape
    binary_mask = np.asarray(binary_mask, dtype=bool)
    binary = bool(binary_mask.all())
    F = trend_basis(Zs, trend, binary_mask)
    if n <= F.shape[1]:
        return Infeasible(config, f"{n} points cannot identify {F.shape[1]} trend terms")
    D = pairwise(Zs, Zs, binary, levels, per_dim=kind.startswith("matern") and not binary)
    idx = np.arange(n)

    def build(log_theta, nugget):
        R = correlation_matrix(kind, 10.0**log_theta, D, m, binary)
        R[idx, idx] += nugget
        return _GLS(R, F, y)

    def objective(log_theta):
        try:
            return build(log_theta, NUGGET).nll
        except (linalg.LinAlgError, ValueError):
            return 1e300

    lo, hi = LOG10_THETA_BOUNDS
    if theta0 is not None:
        c = float(np.clip(np.log10(theta0), lo, hi))
        lo, hi = max(lo, c - 0.5), min(hi, c + 0.5)
    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 0.05})
    best = float(res.x)
    # the bounded search never probes the end points
    for edge in (lo, hi):
        if objective(edge) < res.fun:
            best, res.fun = edge, objective(edge)
    for nugget in (NUGGET, NUGGET_RETRY):
        try:
            gls = build(best, nugget)
        except (linalg.LinAlgError, ValueError):
            continue
        if np.isfinite(gls.beta).all() and np.isfinite(gls.gamma).all():
            return KrigingModel(config, levels, Zs, binary_mask, 10.0**best, gls, nugget)
    return Infeasible(config, "correlation matrix is not positive definite")
