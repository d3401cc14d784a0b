"""Repeated seeded runs of several algorithms on one problem, persisted to disk.

Layout under the output directory::

    <problem>/<algorithm>/run<r>.csv   per-evaluation log
    <problem>/<algorithm>/run<r>.json  run summary
    summary.json                       one row per (problem, algorithm)

``<problem>`` is the problem spec with ``:`` replaced by ``_``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from . import baselines
from .manager import default_n_init, samadiego_run
from .problems import Problem, make_problem
from .stats import SummaryRow, highlight_best, summarize_runs
from .types import Infill, RunConfig, RunLog

log = logging.getLogger(__name__)


@dataclass
class ExperimentSpec:
    problem: str
    algorithms: list[str]
    budget: int = 500
    repetitions: int = 11
    seed: int = 0
    out: Optional[str] = None
    parallel: int = 7
    time_limit: float = 30.0
    n_init: Optional[int] = None
    search_budget: int = 10_000
    stop_at_optimum: bool = False
    infill: Optional[str] = None   # adds sama-diego-<infill> when no sama-diego algorithm is listed

    def __post_init__(self):
        if isinstance(self.algorithms, str):
            self.algorithms = [a.strip() for a in self.algorithms.split(",") if a.strip()]
        if self.infill and not any(a.startswith("sama-diego") for a in self.algorithms):
            self.algorithms = [f"sama-diego-{Infill(self.infill).value}", *self.algorithms]
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.budget < 2:
            raise ValueError("budget must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be unsigned")
        if not self.algorithms:
            raise ValueError("no algorithms given")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithm(s) {unknown}; choose from {sorted(ALGORITHMS)}")
        make_problem(self.problem)


def _sama(infill: Infill) -> Callable:
    def run(problem: Problem, spec: ExperimentSpec, seed: int) -> RunLog:
        cfg = RunConfig(
            budget=spec.budget,
            n_init=spec.n_init or default_n_init(problem.space, spec.budget),
            parallel=spec.parallel,
            time_limit=spec.time_limit,
            infill=infill,
            seed=seed,
            search_budget=spec.search_budget,
        )
        return samadiego_run(problem, cfg, stop_at_optimum=spec.stop_at_optimum)

    return run


def _baseline(fn) -> Callable:
    def run(problem: Problem, spec: ExperimentSpec, seed: int) -> RunLog:
        return fn(problem, spec.budget, seed=seed, stop_at_optimum=spec.stop_at_optimum)

    return run


ALGORITHMS: dict[str, Callable] = {
    "sama-diego-pv": _sama(Infill.PV),
    "sama-diego-ei": _sama(Infill.EI),
    "mies": _baseline(baselines.mies_baseline),
    "ea-1p10": _baseline(baselines.one_plus_lambda_ea),
    "ga-1pll": _baseline(baselines.one_plus_ll_ga),
    "random": _baseline(baselines.random_search_baseline),
}


def problem_dirname(problem: str) -> str:
    return problem.replace(":", "_")


@dataclass
class ExperimentResult:
    logs: dict[str, list[RunLog]] = field(default_factory=dict)
    rows: list[SummaryRow] = field(default_factory=list)


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    """Run every algorithm ``repetitions`` times with seeds ``seed + r``."""
    problem = make_problem(spec.problem)
    result = ExperimentResult()
    for algo in spec.algorithms:
        runs = []
        for r in range(spec.repetitions):
            seed = spec.seed + r
            log.info("%s %s run %d (seed %d)", spec.problem, algo, r, seed)
            lg = ALGORITHMS[algo](problem, spec, seed)
            lg.algorithm = algo
            runs.append(lg)
            if spec.out:
                lg.write(Path(spec.out) / problem_dirname(spec.problem) / algo / f"run{r}")
        result.logs[algo] = runs
        result.rows.append(summarize_runs(runs))
    if len(result.rows) >= 2:
        finals = {a: [lg.best_objective for lg in runs] for a, runs in result.logs.items()}
        highlight_best(result.rows, finals, problem.sense)
    if spec.out:
        # rebuilt from disk so marks cover every algorithm stored for the problem
        write_summary(Path(spec.out), summarize_dir(spec.out))
    return result


def write_summary(out: Path, rows: list[SummaryRow]) -> None:
    """Write ``rows`` as ``<out>/summary.json``."""
    path = Path(out) / "summary.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps([r.as_dict() for r in rows], indent=2))


def load_runs(root) -> dict[tuple[str, str], list[RunLog]]:
    """Read every persisted run under ``root``, keyed by (problem, algorithm)."""
    groups: dict[tuple[str, str], list[RunLog]] = {}
    for js in sorted(Path(root).glob("*/*/run*.json"), key=lambda p: (p.parent, int(p.stem[3:]))):
        lg = RunLog.read(js.with_suffix(""))
        groups.setdefault((lg.problem, js.parent.name), []).append(lg)
    return groups


def summarize_dir(root) -> list[SummaryRow]:
    rows = []
    by_problem: dict[str, list[SummaryRow]] = {}
    groups = load_runs(root)
    for (problem, algo), runs in groups.items():
        for lg in runs:
            lg.algorithm = algo
        row = summarize_runs(runs)
        rows.append(row)
        by_problem.setdefault(problem, []).append(row)
    for problem, prow in by_problem.items():
        if len(prow) >= 2:
            finals = {r.algorithm: [lg.best_objective for lg in groups[(problem, r.algorithm)]] for r in prow}
            highlight_best(prow, finals, make_problem(problem).sense)
    return rows
