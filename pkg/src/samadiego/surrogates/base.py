"""Common surrogate contract, configuration identifiers and metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class SurrogateConfig:
    """One member of the model pool: a family plus its fixed hyperchoices."""

    family: str
    kernel: Optional[str] = None
    trend: Optional[str] = None

    @property
    def id(self) -> str:
        return ":".join(p for p in (self.family, self.kernel, self.trend) if p)

    @classmethod
    def parse(cls, ident: str) -> "SurrogateConfig":
        parts = ident.split(":")
        return cls(*parts)

    def __str__(self):
        return self.id


@dataclass(frozen=True)
class Infeasible:
    """Verdict for a fit that failed numerically."""

    config: SurrogateConfig
    reason: str

    def __bool__(self):
        return False


class UnsupportedError(RuntimeError):
    """Raised when a model cannot provide predictive uncertainty."""


class FittedSurrogate:
    """A trained model. Inputs are batches of level-index designs."""

    supports_uncertainty = True

    def __init__(self, config: SurrogateConfig, levels: np.ndarray):
        self.config = config
        self.levels = np.asarray(levels)
        self.hyper: dict = {}

    @property
    def id(self) -> str:
        return self.config.id

    def scale(self, X) -> np.ndarray:
        return np.atleast_2d(np.asarray(X, dtype=float)) / (self.levels - 1)

    def predict(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict_with_uncertainty(self, X) -> tuple[np.ndarray, np.ndarray]:
        raise UnsupportedError(f"{self.id} provides no uncertainty estimate")

    def __repr__(self):
        return f"<{type(self).__name__} {self.id}>"


@dataclass
class Distances:
    """Pairwise distance statistics between two sets of scaled points.

    ``steps`` optionally holds per-coordinate absolute differences counted in
    levels, coordinate-major (shape ``(m, len(A), len(B))``); ``step``
    converts one level to scaled units per coordinate.
    """

    l1: np.ndarray
    sq: np.ndarray
    steps: Optional[np.ndarray] = field(default=None, repr=False)
    step: Optional[np.ndarray] = None


def sq_euclidean(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    d = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    # distinct scaled designs are far more than 1e-5 apart; anything tinier is round-off
    d[d < 1e-10] = 0.0
    return d


def pairwise(A: np.ndarray, B: np.ndarray, binary: bool, levels=None, per_dim: bool = False) -> Distances:
    """Distance statistics; on {0, 1} data the L1 and squared-L2 distances coincide."""
    sq = sq_euclidean(A, B)
    if binary:
        sq = np.rint(sq)
        return Distances(sq, sq)
    from scipy.spatial.distance import cdist

    l1 = cdist(A, B, "cityblock")
    if not per_dim:
        return Distances(l1, sq)
    step = 1.0 / (levels - 1)
    IA = np.rint(A / step).astype(np.int16)
    IB = np.rint(B / step).astype(np.int16)
    return Distances(l1, sq, np.abs(IA.T[:, :, None] - IB.T[:, None, :]), step)


def r2_score(y_true, y_pred) -> float:
    """Coefficient of determination ``1 - SS_res / SS_tot``."""
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape or y_true.size < 2:
        raise ValueError("need two equal-length sequences of at least 2 values")
    ss_tot = ((y_true - y_true.mean()) ** 2).sum()
    if ss_tot == 0:
        raise ValueError("R^2 is undefined for constant y_true")
    return float(1.0 - ((y_true - y_pred) ** 2).sum() / ss_tot)
