"""Discrete Latin-hypercube sampling."""

import numpy as np

from .types import SearchSpace


def lhs_sample(space: SearchSpace, k: int, seed=None) -> np.ndarray:
    """Draw ``k`` designs by stratified Latin-hypercube sampling.

    Each variable's range ``[0, levels)`` is cut into ``k`` equal-width strata
    and every stratum yields one level, assigned to rows by an independent
    permutation per variable. A stratum ``[a, b)`` that contains integers
    yields one of them uniformly; a stratum narrower than one level (only when
    ``k > levels``) yields the floor of a uniform draw inside it.

    Returns an integer array of shape ``(k, space.dim)``.
    """
    if k < 2:
        raise ValueError(f"need at least 2 samples, got {k}")
    rng = np.random.default_rng(seed)
    out = np.empty((k, space.dim), dtype=np.int64)
    s = np.arange(k)
    for j, levels in enumerate(space.levels.tolist()):
        lo = s * levels / k
        hi = (s + 1) * levels / k
        first = np.ceil(lo)
        last = np.ceil(hi) - 1
        u = rng.random(k)
        inner = first + np.floor(u * (last - first + 1))
        fallback = np.floor(lo + u * (hi - lo))
        vals = np.where(last >= first, inner, fallback).astype(np.int64)
        out[:, j] = np.minimum(vals, levels - 1)[rng.permutation(k)]
    return out


def stratum_of(level: int, levels: int, k: int) -> int:
    """Index of the stratum ``[s*levels/k, (s+1)*levels/k)`` holding ``level``."""
    return min(int(level * k // levels), k - 1)
