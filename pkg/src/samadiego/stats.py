"""Wilcoxon rank-sum test and summary rows for repeated runs."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.stats import norm, rankdata

from .types import RunLog, Sense

EXACT_MAX_N = 25


def _exact_rank_sum_counts(doubled_ranks: np.ndarray, k: int) -> dict[int, int]:
    """How many k-subsets of the pooled (doubled) midranks give each sum."""
    # layers[j] maps subset sum -> count for subsets of size j
    layers: list[dict[int, int]] = [{0: 1}] + [{} for _ in range(k)]
    for r in doubled_ranks.tolist():
        for j in range(k, 0, -1):
            src, dst = layers[j - 1], layers[j]
            for s, c in src.items():
                dst[s + r] = dst.get(s + r, 0) + c
    return layers[k]


def wilcoxon_rank_sum(a: Sequence[float], b: Sequence[float]) -> float:
    """Two-sided rank-sum p-value with midranks for ties.

    Exact (over all equally likely label assignments) when the pooled size is
    at most 25, normal approximation with tie-corrected variance and 0.5
    continuity correction otherwise.

    >>> wilcoxon_rank_sum([1, 2, 3], [10, 11, 12])
    0.1
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) < 3 or len(b) < 3:
        raise ValueError("each sample needs at least 3 values")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ValueError("samples must be finite")
    na, nb = len(a), len(b)
    n = na + nb
    ranks = rankdata(np.concatenate([a, b]))
    doubled = np.rint(2 * ranks).astype(np.int64)
    w2 = int(doubled[:na].sum())
    mu2 = na * (n + 1)
    dev = abs(w2 - mu2)
    if n <= EXACT_MAX_N:
        counts = _exact_rank_sum_counts(doubled, na)
        extreme = sum(c for s, c in counts.items() if abs(s - mu2) >= dev)
        return min(1.0, extreme / math.comb(n, na))
    _, ties = np.unique(ranks, return_counts=True)
    var = na * nb / 12.0 * ((n + 1) - (ties ** 3 - ties).sum() / (n * (n - 1)))
    if var <= 0:
        return 1.0
    z = max(dev / 2.0 - 0.5, 0.0) / math.sqrt(var)
    return float(min(1.0, 2.0 * norm.sf(z)))


@dataclass
class SummaryRow:
    problem: str
    algorithm: str
    repetitions: int
    best: float
    mean: float
    median: float
    std: float
    mean_evals_to_optimum: Optional[float]
    single_sample: bool
    marked: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def summarize_runs(logs: Sequence[RunLog], budget: Optional[int] = None) -> SummaryRow:
    """Statistics of final best values over runs of one (problem, algorithm).

    The standard deviation is the population one (``ddof=0``). Runs that never
    hit the known optimum count as ``budget`` evaluations (default: each run's
    recorded budget limit, else its length).
    """
    if not logs:
        raise ValueError("no runs to summarize")
    first = logs[0]
    finals = np.array([lg.best_objective for lg in logs])
    best = finals.max() if first.sense == Sense.MAXIMIZE else finals.min()
    hits = None
    if first.known_optimum is not None:
        hits = float(np.mean([lg.evals_to_optimum() or budget or lg.notes.get("budget_limit", len(lg))
                              for lg in logs]))
    return SummaryRow(
        problem=first.problem,
        algorithm=first.algorithm,
        repetitions=len(logs),
        best=float(best),
        mean=float(finals.mean()),
        median=float(np.median(finals)),
        std=float(finals.std()),
        mean_evals_to_optimum=hits,
        single_sample=len(logs) == 1,
    )


def highlight_best(rows: Sequence[SummaryRow], finals: Mapping[str, Sequence[float]], sense: Sense,
                   alpha: float = 0.05) -> list[SummaryRow]:
    """Mark the best-mean algorithm and every one not significantly worse.

    ``finals`` maps algorithm name to its per-run final values. Algorithms
    with fewer than 3 runs can only be marked if they have the best mean.
    """
    if len(rows) < 2:
        raise ValueError("need at least two algorithms to compare")
    sign = -1.0 if Sense(sense) == Sense.MAXIMIZE else 1.0
    best = min(rows, key=lambda r: sign * r.mean)
    for r in rows:
        if r is best:
            r.marked = True
            continue
        try:
            r.marked = wilcoxon_rank_sum(finals[r.algorithm], finals[best.algorithm]) >= alpha
        except ValueError:
            r.marked = False
    return list(rows)
