"""Benchmark objectives: pseudo-Boolean problems and an ordinal suite.

Every objective is vectorized: it accepts one design (1-D) or a batch of
designs (2-D, one per row) and returns a float or an array accordingly.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .types import SearchSpace, Sense, validate_design


def _batch(x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x)
    single = x.ndim == 1
    if not np.issubdtype(x.dtype, np.integer):
        x = x.astype(np.int64)
    return np.atleast_2d(x), single


def _out(v: np.ndarray, single: bool):
    v = np.asarray(v, dtype=float)
    return float(v[0]) if single else v


def _square_side(n: int) -> int:
    k = math.isqrt(n)
    if k * k != n:
        raise ValueError(f"dimension {n} is not a perfect square")
    return k


def labs(x):
    """Merit factor ``n^2 / (2E)`` of the +-1 sequence ``s = 2x - 1``."""
    x, single = _batch(x)
    n = x.shape[1]
    if n < 2:
        raise ValueError("LABS needs n >= 2")
    s = 2 * x - 1
    energy = np.zeros(len(s), dtype=np.int64)
    for k in range(1, n):
        c = np.einsum("ij,ij->i", s[:, :-k], s[:, k:])
        energy += c * c
    # C_{n-1} = s_1 s_n = +-1, so E >= 1
    assert (energy >= 1).all()
    return _out(n * n / (2.0 * energy), single)


def _agreements(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    xt = np.ascontiguousarray(x.T)
    return (xt[a] == xt[b]).sum(axis=0)


def ising_ring(x):
    """Number of agreeing neighbour pairs on a ring of n spins."""
    x, single = _batch(x)
    n = x.shape[1]
    if n < 3:
        raise ValueError("ring Ising needs n >= 3")
    i = np.arange(n)
    return _out(_agreements(x, i, (i + 1) % n), single)


def torus_edges(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Right and down neighbour edges of a k x k torus, row-major cells."""
    r, c = np.divmod(np.arange(k * k), k)
    right = r * k + (c + 1) % k
    down = ((r + 1) % k) * k + c
    idx = np.arange(k * k)
    return np.concatenate([idx, idx]), np.concatenate([right, down])


def ising_torus(x):
    """Number of agreeing neighbour pairs on a k x k torus (2n edges)."""
    x, single = _batch(x)
    k = _square_side(x.shape[1])
    if k < 2:
        raise ValueError("torus Ising needs k >= 2")
    a, b = torus_edges(k)
    return _out(_agreements(x, a, b), single)


def mivs_graph(n: int) -> np.ndarray:
    """Edge list of the independent-set benchmark graph on n vertices.

    The first ``m = n - n % 2`` vertices form two rows of ``m/2``; each row is
    a path, and vertex ``i`` of the top row is joined to the bottom-row
    vertices in columns ``i - 1`` and ``i + 1``. A leftover odd vertex is
    isolated and ignored by the objective. Maximum independent set: ``m/2``.
    """
    m = n - n % 2
    if m < 2:
        raise ValueError(f"unsupported MIVS dimension {n}")
    half = m // 2
    edges = []
    # 1-based vertex labels, as in the reference benchmark generator
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            if (i != half and j == i + 1) or (i <= half - 1 and j == i + half + 1) \
                    or (2 <= i <= half and j == i + half - 1):
                edges.append((i - 1, j - 1))
    return np.array(edges, dtype=np.int64)


def mivs(x, edges: Optional[np.ndarray] = None):
    """Penalized independent-set size ``|S| - m * (#edges inside S)``.

    ``edges`` overrides the benchmark graph (used with small test graphs);
    the penalty coefficient is then the vertex count.
    """
    x, single = _batch(x)
    n = x.shape[1]
    if edges is None:
        edges = mivs_graph(n)
        m = n - n % 2
        x = x[:, :m]
    else:
        m = n
    xt = np.ascontiguousarray(x.T)
    violated = (xt[edges[:, 0]] & xt[edges[:, 1]]).sum(axis=0)
    return _out(xt.sum(axis=0) - m * violated, single)


def queen_lines(k: int) -> list[np.ndarray]:
    """Cell indices of every row, column, diagonal and anti-diagonal of a k x k board."""
    board = np.arange(k * k).reshape(k, k)
    lines = [board[i] for i in range(k)] + [board[:, j] for j in range(k)]
    flipped = board[:, ::-1]
    for off in range(-(k - 1), k):
        lines.append(np.diagonal(board, off))
        lines.append(np.diagonal(flipped, off))
    return [ln for ln in lines if len(ln) > 1]


def nqp(x):
    """N-queens score: queens placed minus ``k`` per surplus queen on any line."""
    x, single = _batch(x)
    k = _square_side(x.shape[1])
    xt = np.ascontiguousarray(x.T)
    penalty = np.zeros(len(x), dtype=np.int64)
    for line in queen_lines(k):
        penalty += np.maximum(0, xt[line].sum(axis=0) - 1)
    return _out(xt.sum(axis=0) - k * penalty, single)


def decode_ordinal(x) -> np.ndarray:
    """Map levels 0..100 linearly onto [-5, 5]."""
    return -5.0 + np.asarray(x, dtype=float) / 10.0


def sphere(z: np.ndarray) -> np.ndarray:
    return (z**2).sum(axis=-1)


def rosenbrock(z: np.ndarray) -> np.ndarray:
    return (100.0 * (z[..., 1:] - z[..., :-1] ** 2) ** 2 + (z[..., :-1] - 1.0) ** 2).sum(axis=-1)


def rastrigin(z: np.ndarray) -> np.ndarray:
    m = z.shape[-1]
    return 10.0 * m + (z**2 - 10.0 * np.cos(2 * np.pi * z)).sum(axis=-1)


ORDINAL_FUNCTIONS = {"sphere": sphere, "rosenbrock": rosenbrock, "rastrigin": rastrigin}
ORDINAL_LEVELS = 101


def ordinal_bbob(name: str, x):
    """Evaluate an ordinal benchmark on 101-level variables (levels decoded to [-5, 5])."""
    fn = ORDINAL_FUNCTIONS[name]
    x, single = _batch(x)
    if (x < 0).any() or (x >= ORDINAL_LEVELS).any():
        raise ValueError("ordinal benchmarks expect levels in [0, 100]")
    return _out(fn(decode_ordinal(x)), single)


@dataclass(frozen=True)
class Problem:
    name: str
    space: SearchSpace
    sense: Sense
    fn: Callable
    known_optimum: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.space.dim

    def evaluate(self, d) -> float:
        bad = validate_design(self.space, d)
        if bad is not None:
            raise ValueError(f"invalid design at index {bad.index}: {bad.reason}")
        return float(self.fn(np.asarray(d, dtype=np.int64)))

    def evaluate_batch(self, X) -> np.ndarray:
        return np.asarray(self.fn(np.atleast_2d(np.asarray(X, dtype=np.int64))), dtype=float)

    def is_optimal(self, y: float, tol: float = 1e-9) -> bool:
        if self.known_optimum is None:
            return False
        gap = self.known_optimum - y if self.sense == Sense.MAXIMIZE else y - self.known_optimum
        return gap <= tol


def _nqp_optimum(k: int) -> Optional[float]:
    # no k-queens solution exists for k = 2, 3
    return float(k) if k == 1 or k >= 4 else None


def make_problem(spec: str) -> Problem:
    """Build a registered problem from ``"<name>:<dim>"``, e.g. ``"ising2d:25"``."""
    try:
        name, dim_s = spec.lower().split(":")
        n = int(dim_s)
    except ValueError:
        raise ValueError(f"problem spec must look like 'name:dim', got {spec!r}") from None
    if n < 1:
        raise ValueError("dimension must be positive")
    key = f"{name}:{n}"
    if name == "labs":
        if n < 2:
            raise ValueError("LABS needs n >= 2")
        return Problem(key, SearchSpace.binary(n), Sense.MAXIMIZE, labs)
    if name == "ising1d":
        if n < 3:
            raise ValueError("ising1d needs n >= 3")
        return Problem(key, SearchSpace.binary(n), Sense.MAXIMIZE, ising_ring, float(n))
    if name == "ising2d":
        if _square_side(n) < 2:
            raise ValueError("ising2d needs k >= 2")
        return Problem(key, SearchSpace.binary(n), Sense.MAXIMIZE, ising_torus, float(2 * n))
    if name == "mivs":
        mivs_graph(n)
        return Problem(key, SearchSpace.binary(n), Sense.MAXIMIZE, mivs, float((n - n % 2) // 2))
    if name == "nqp":
        k = _square_side(n)
        return Problem(key, SearchSpace.binary(n), Sense.MAXIMIZE, nqp, _nqp_optimum(k))
    if name in ORDINAL_FUNCTIONS:
        if name == "rosenbrock" and n < 2:
            raise ValueError("rosenbrock needs at least 2 variables")
        return Problem(key, SearchSpace.ordinal(n, ORDINAL_LEVELS), Sense.MINIMIZE,
                       functools.partial(ordinal_bbob, name), 0.0)
    raise ValueError(f"unknown problem {name!r}")


PROBLEM_NAMES = ("labs", "ising1d", "ising2d", "mivs", "nqp", *ORDINAL_FUNCTIONS)


def brute_force_optimum(problem: Problem, cap: int = 2**25, chunk: int = 2**18):
    """Exhaustively enumerate the space; return ``(best design, best value)``.

    Ties resolve to the first design in lexicographic order.
    """
    space = problem.space
    total = space.cardinality()
    if total > cap:
        raise ValueError(f"search space has {total} points, above the cap {cap}")
    levels = space.levels
    maximize = problem.sense == Sense.MAXIMIZE
    best_val, best_x = None, None
    # mixed-radix digits, last variable fastest
    radix = np.concatenate([np.cumprod(levels[::-1])[::-1][1:], [1]])
    shifts = np.arange(space.dim - 1, -1, -1)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        if space.is_binary:
            X = ((idx[:, None] >> shifts) & 1).astype(np.int8)
        else:
            X = (idx[:, None] // radix) % levels
        vals = problem.evaluate_batch(X)
        i = int(np.argmax(vals) if maximize else np.argmin(vals))
        v = float(vals[i])
        if best_val is None or (v > best_val if maximize else v < best_val):
            best_val, best_x = v, X[i].copy()
    return best_x, best_val


def all_designs(space: SearchSpace):
    """Iterate every design of a (small) space in lexicographic order."""
    return itertools.product(*(range(int(v)) for v in space.levels))
