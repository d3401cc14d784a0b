"""Augmented radial-basis-function interpolation with a polynomial tail."""

from __future__ import annotations

import warnings

import numpy as np
from scipy import linalg

from .base import FittedSurrogate, Infeasible, SurrogateConfig, sq_euclidean

# singular systems are detected by the residual check below
warnings.filterwarnings("ignore", category=linalg.LinAlgWarning, module=__name__)

RBF_KERNELS = ("linear", "cubic", "tps", "poly4", "poly5", "gaussian", "mq", "imq", "iq")

# sign making (-1)^m * phi conditionally positive definite of order m
_CPD_SIGN = {
    "linear": -1.0, "cubic": 1.0, "tps": 1.0, "poly4": -1.0, "poly5": -1.0,
    "gaussian": 1.0, "mq": -1.0, "imq": 1.0, "iq": 1.0,
}


def _xlogx_pow(d: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros_like(d)
    pos = d > 0
    out[pos] = d[pos] ** p * np.log(d[pos])
    return out


def rbf_phi(kernel: str, d, eps: float = 1.0):
    """Evaluate the radial function ``phi(d)`` for ``d >= 0``.

    ``eps`` is the shape parameter of the gaussian and (inverse) multiquadric
    kernels. Log-based kernels take the value 0 at ``d = 0``.
    """
    arr = np.asarray(d, dtype=float)
    if (arr < 0).any():
        raise ValueError("distance must be non-negative")
    if kernel == "linear":
        out = arr.copy()
    elif kernel == "cubic":
        out = arr**3
    elif kernel == "tps":
        out = _xlogx_pow(arr, 2)
    elif kernel == "poly4":
        out = _xlogx_pow(arr, 4)
    elif kernel == "poly5":
        out = arr**5
    elif kernel == "gaussian":
        out = np.exp(-((eps * arr) ** 2))
    elif kernel == "mq":
        out = np.sqrt(1.0 + (eps * arr) ** 2)
    elif kernel == "imq":
        out = 1.0 / np.sqrt(1.0 + (eps * arr) ** 2)
    elif kernel == "iq":
        out = 1.0 / (1.0 + (eps * arr) ** 2)
    else:
        raise ValueError(f"unknown RBF kernel {kernel!r}")
    return float(out) if np.ndim(d) == 0 else out


class RBFModel(FittedSurrogate):
    """Interpolant ``s(x) = sum_i c_i phi(|x - x_i|) + p(x)``.

    The uncertainty is the kernel power function, scaled by the native-norm
    estimate of the data so that it comes out in objective units. It vanishes
    at the training points.
    """

    def __init__(self, config, levels, Xs, coef, poly, lu, degree, eps, sigma2):
        super().__init__(config, levels)
        self.Xs = Xs
        self.coef = coef
        self.poly = poly
        self.lu = lu
        self.degree = degree
        self.eps = eps
        self.sigma2 = sigma2
        self.sign = _CPD_SIGN[config.kernel]
        self.hyper = {"tail_degree": degree, "eps": eps}

    def _kernel_rows(self, sq):
        return rbf_phi(self.config.kernel, np.sqrt(sq), self.eps)

    def predict(self, X):
        Z = self.scale(X)
        return self._kernel_rows(sq_euclidean(Z, self.Xs)) @ self.coef + _tail(Z, self.degree) @ self.poly

    def predict_with_uncertainty(self, X):
        Z = self.scale(X)
        sq = sq_euclidean(Z, self.Xs)
        K = self._kernel_rows(sq)
        P = _tail(Z, self.degree)
        mean = K @ self.coef + P @ self.poly
        V = np.hstack([self.sign * K, P])
        W = linalg.lu_solve(self.lu, V.T, check_finite=False)
        phi0 = self.sign * rbf_phi(self.config.kernel, 0.0, self.eps)
        power = phi0 - np.einsum("ij,ji->i", V, W)
        # exactly zero at the nodes; the subtraction above only leaves round-off there
        power[(sq == 0).any(1)] = 0.0
        var = self.sigma2 * np.maximum(power, 0.0)
        return mean, np.sqrt(var)


def _tail(Z: np.ndarray, degree: int) -> np.ndarray:
    ones = np.ones((len(Z), 1))
    return np.hstack([ones, Z]) if degree == 1 else ones


def fit_rbf(config: SurrogateConfig, X: np.ndarray, y: np.ndarray, levels: np.ndarray):
    Xs = np.asarray(X, dtype=float) / (levels - 1)
    n, m = Xs.shape
    eps = 1.0 / np.sqrt(m)
    sign = _CPD_SIGN[config.kernel]
    # linear tail only when the points are unisolvent for it
    degree = 0
    if n >= m + 2:
        if np.linalg.matrix_rank(np.hstack([np.ones((n, 1)), Xs])) == m + 1:
            degree = 1
    P = _tail(Xs, degree)
    q = P.shape[1]
    Phi = sign * rbf_phi(config.kernel, np.sqrt(sq_euclidean(Xs, Xs)), eps)
    A = np.zeros((n + q, n + q))
    A[:n, :n] = Phi
    A[:n, n:] = P
    A[n:, :n] = P.T
    rhs = np.concatenate([y, np.zeros(q)])
    for jitter in (0.0, 1e-10):
        M = A.copy()
        M[np.arange(n), np.arange(n)] += jitter
        try:
            lu = linalg.lu_factor(M, check_finite=False)
            sol = linalg.lu_solve(lu, rhs, check_finite=False)
        except (linalg.LinAlgError, ValueError):
            continue
        if not np.isfinite(sol).all():
            continue
        # judge against the unjittered system: the model must interpolate y
        resid = np.abs(A @ sol - rhs).max()
        if resid > 1e-8 * max(1.0, np.abs(rhs).max()):
            continue
        lam = sol[:n]
        sigma2 = max(float(lam @ (y - P @ sol[n:])) / n, 0.0)
        return RBFModel(config, levels, Xs, sign * lam, sol[n:], lu, degree, eps, sigma2)
    return Infeasible(config, "interpolation system is singular")
