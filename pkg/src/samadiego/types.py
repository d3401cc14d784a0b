"""Shared value types: search spaces, designs, datasets, run configuration and logs."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


class Sense(str, Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class VarKind(str, Enum):
    BINARY = "binary"
    ORDINAL = "ordinal"


@dataclass(frozen=True)
class VariableSpec:
    kind: VarKind
    levels: int

    def __post_init__(self):
        if self.kind == VarKind.BINARY and self.levels != 2:
            raise ValueError("binary variables have exactly 2 levels")
        if self.levels < 2:
            raise ValueError(f"levels must be >= 2, got {self.levels}")


@dataclass(frozen=True)
class SearchSpace:
    """An ordered list of discrete variables.

    Designs over a space are integer vectors of 0-based level indices.
    """

    variables: tuple[VariableSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise ValueError("a search space needs at least one variable")

    @classmethod
    def binary(cls, n: int) -> "SearchSpace":
        return cls(tuple(VariableSpec(VarKind.BINARY, 2) for _ in range(n)))

    @classmethod
    def ordinal(cls, n: int, levels: int) -> "SearchSpace":
        return cls(tuple(VariableSpec(VarKind.ORDINAL, levels) for _ in range(n)))

    @property
    def dim(self) -> int:
        return len(self.variables)

    @property
    def levels(self) -> np.ndarray:
        return np.array([v.levels for v in self.variables], dtype=np.int64)

    @property
    def is_binary(self) -> bool:
        return all(v.kind == VarKind.BINARY for v in self.variables)

    @property
    def binary_mask(self) -> np.ndarray:
        return np.array([v.kind == VarKind.BINARY for v in self.variables])

    def cardinality(self) -> int:
        return math.prod(int(v.levels) for v in self.variables)

    def scale(self, X) -> np.ndarray:
        """Map level indices to [0, 1] per variable."""
        X = np.asarray(X, dtype=float)
        return X / (self.levels - 1)

    def random(self, rng: np.random.Generator, n: Optional[int] = None) -> np.ndarray:
        size = (self.dim,) if n is None else (n, self.dim)
        return rng.integers(0, self.levels, size=size)


@dataclass(frozen=True)
class Violation:
    index: int
    reason: str


def validate_design(space: SearchSpace, d) -> Optional[Violation]:
    """Check ``d`` against ``space``; return None when valid, else the first violation.

    Never raises, whatever ``d`` is.
    """
    try:
        values = list(d)
    except TypeError:
        return Violation(-1, "design is not a sequence")
    if len(values) != space.dim:
        return Violation(-1, f"length {len(values)} != dimensionality {space.dim}")
    for i, (v, spec) in enumerate(zip(values, space.variables)):
        try:
            iv = int(v)
        except (TypeError, ValueError, OverflowError):
            return Violation(i, f"non-integer value {v!r}")
        if iv != v:
            return Violation(i, f"non-integer value {v!r}")
        if iv < 0 or iv >= spec.levels:
            return Violation(i, f"level {iv} out of range [0, {spec.levels})")
    return None


def to_minimize(y: float, sense: Sense) -> float:
    """Express an objective value in minimize sense (negate maximization)."""
    if not math.isfinite(y):
        raise ValueError(f"objective must be finite, got {y}")
    if Sense(sense) == Sense.MAXIMIZE:
        return -y if y != 0 else 0.0
    return y


def design_key(d) -> bytes:
    """Hashable key for exact-match lookups of designs."""
    return np.asarray(d, dtype=np.int64).tobytes()


def format_design(d) -> str:
    return "-".join(str(int(v)) for v in d)


def parse_design(s: str) -> np.ndarray:
    return np.array([int(v) for v in s.split("-")], dtype=np.int64)


@dataclass
class Dataset:
    """Archive of evaluated designs and their raw objective values."""

    designs: list = field(default_factory=list)
    objectives: list = field(default_factory=list)
    sense: Sense = Sense.MINIMIZE

    def __post_init__(self):
        if len(self.designs) != len(self.objectives):
            raise ValueError("designs and objectives differ in length")
        if not all(math.isfinite(y) for y in self.objectives):
            raise ValueError("objectives must be finite")

    def __len__(self):
        return len(self.designs)

    def append(self, d, y: float):
        if not math.isfinite(y):
            raise ValueError("objectives must be finite")
        self.designs.append(np.asarray(d, dtype=np.int64))
        self.objectives.append(float(y))

    @property
    def X(self) -> np.ndarray:
        return np.vstack(self.designs)

    @property
    def y_min(self) -> np.ndarray:
        """Objectives in minimize sense."""
        y = np.asarray(self.objectives, dtype=float)
        return -y if self.sense == Sense.MAXIMIZE else y


class Infill(str, Enum):
    PV = "pv"
    EI = "ei"


@dataclass(frozen=True)
class RunConfig:
    budget: int
    n_init: int
    parallel: int = 7
    time_limit: float = 30.0
    infill: Infill = Infill.PV
    seed: int = 0
    search_budget: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "infill", Infill(self.infill))
        if self.budget < 1 or self.n_init < 1:
            raise ValueError("budget and n_init must be positive")
        if self.n_init >= self.budget:
            raise ValueError("n_init must be smaller than the budget")
        if self.parallel < 1:
            raise ValueError("parallel must be >= 1")
        if not self.time_limit > 0:
            raise ValueError("time_limit must be positive")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")


@dataclass(frozen=True)
class EvalRecord:
    index: int
    design: tuple
    objective: float
    best_so_far: float
    model_id: Optional[str]
    elapsed: float


CSV_HEADER = ["eval", "design", "objective", "best_so_far", "model_id", "elapsed_s"]
_SUMMARY_KEYS = {"problem", "dim", "seed", "algorithm", "infill", "sense", "known_optimum", "budget",
                 "best_objective", "evals_to_optimum"}


@dataclass
class RunLog:
    """Per-evaluation trace of one optimization run.

    Objective values are stored in the problem's own sense; ``best_so_far``
    is the running best in that sense.
    """

    problem: str
    sense: Sense
    seed: int = 0
    algorithm: str = ""
    infill: Optional[str] = None
    known_optimum: Optional[float] = None
    records: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def _better(self, a: float, b: float) -> bool:
        return a > b if self.sense == Sense.MAXIMIZE else a < b

    def record(self, design, objective: float, model_id: Optional[str], elapsed: float) -> EvalRecord:
        objective = float(objective)
        if self.records and not self._better(objective, self.records[-1].best_so_far):
            best = self.records[-1].best_so_far
        else:
            best = objective
        rec = EvalRecord(len(self.records) + 1, tuple(int(v) for v in design), objective, best, model_id, float(elapsed))
        self.records.append(rec)
        return rec

    def __len__(self):
        return len(self.records)

    @property
    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    @property
    def best_objective(self) -> float:
        return self.records[-1].best_so_far

    @property
    def best_design(self) -> tuple:
        best = self.best_objective
        return next(r.design for r in self.records if r.objective == best)

    @property
    def dim(self) -> int:
        return len(self.records[0].design) if self.records else 0

    def evals_to_optimum(self, tol: float = 1e-9) -> Optional[int]:
        """1-based index of the first record reaching the known optimum."""
        if self.known_optimum is None:
            return None
        for r in self.records:
            gap = self.known_optimum - r.objective if self.sense == Sense.MAXIMIZE else r.objective - self.known_optimum
            if gap <= tol:
                return r.index
        return None

    def summary(self) -> dict:
        return {
            "problem": self.problem,
            "dim": self.dim,
            "seed": self.seed,
            "algorithm": self.algorithm,
            "infill": self.infill,
            "sense": self.sense.value,
            "known_optimum": self.known_optimum,
            "budget": len(self.records),
            "best_objective": self.best_objective,
            "evals_to_optimum": self.evals_to_optimum(),
            **self.notes,
        }

    def write_csv(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in self.records:
                w.writerow([r.index, format_design(r.design), repr(r.objective), repr(r.best_so_far),
                            r.model_id or "", repr(r.elapsed)])

    def write(self, stem) -> None:
        """Write ``<stem>.csv`` and its JSON summary ``<stem>.json``."""
        stem = Path(stem)
        self.write_csv(stem.with_suffix(".csv"))
        stem.with_suffix(".json").write_text(json.dumps(self.summary(), indent=2))

    @classmethod
    def read(cls, stem) -> "RunLog":
        stem = Path(stem)
        meta = json.loads(stem.with_suffix(".json").read_text())
        log = cls(meta["problem"], Sense(meta["sense"]), meta["seed"], meta.get("algorithm", ""),
                  meta.get("infill"), meta.get("known_optimum"))
        log.notes = {k: v for k, v in meta.items() if k not in _SUMMARY_KEYS}
        with stem.with_suffix(".csv").open(newline="") as fh:
            for row in csv.DictReader(fh):
                log.records.append(EvalRecord(
                    int(row["eval"]), tuple(parse_design(row["design"]).tolist()), float(row["objective"]),
                    float(row["best_so_far"]), row["model_id"] or None, float(row["elapsed_s"])))
        return log


def running_best(values: Sequence[float], sense: Sense) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return np.maximum.accumulate(v) if sense == Sense.MAXIMIZE else np.minimum.accumulate(v)
