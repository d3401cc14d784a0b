"""Command line: ``run`` experiments, ``summarize`` and ``compare`` saved runs.

Examples::

    samadiego run --problem ising1d:25 --algo sama-diego-pv,ea-1p10 --reps 11 --out out/
    samadiego run --config experiments.yaml
    samadiego summarize --in out/
    samadiego compare --in out/ --alpha 0.05
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import yaml

from .harness import ExperimentSpec, load_runs, run_experiment, summarize_dir, write_summary
from .stats import SummaryRow, wilcoxon_rank_sum
from .types import Sense

# CLI flag name -> ExperimentSpec field
RUN_KEYS = {
    "problem": "problem", "algo": "algorithms", "budget": "budget", "reps": "repetitions",
    "seed": "seed", "infill": "infill", "parallel": "parallel", "time_limit": "time_limit",
    "out": "out", "n_init": "n_init", "search_budget": "search_budget", "stop_at_optimum": "stop_at_optimum",
}


def load_config(path) -> list[dict]:
    """Experiments from a YAML or JSON file: a list, or a mapping with ``experiments``."""
    data = yaml.safe_load(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("experiments", [data])
    if not isinstance(data, list) or not all(isinstance(e, dict) for e in data):
        raise ValueError(f"{path}: expected a list of experiment mappings")
    return data


def _spec_kwargs(entry: dict) -> dict:
    out = {}
    for key, value in entry.items():
        key = key.replace("-", "_")
        if key not in RUN_KEYS:
            raise ValueError(f"unknown experiment key {key!r}")
        out[RUN_KEYS[key]] = value
    return out


def build_specs(args) -> list[ExperimentSpec]:
    cli = {k: getattr(args, k) for k in RUN_KEYS if getattr(args, k, None) is not None}
    entries = load_config(args.config) if args.config else [{}]
    specs = []
    for entry in entries:
        merged = {**_spec_kwargs(entry), **_spec_kwargs(cli)}
        if "problem" not in merged:
            raise ValueError("no --problem given")
        merged.setdefault("algorithms", ["sama-diego-pv"] if not merged.get("infill") else [])
        specs.append(ExperimentSpec(**merged))
    return specs


def format_rows(rows: list[SummaryRow]) -> str:
    head = f"{'problem':<16}{'algorithm':<16}{'reps':>5}{'best':>12}{'mean':>12}{'median':>12}{'std':>10}{'evals':>9}"
    lines = [head, "-" * len(head)]
    for r in rows:
        evals = "-" if r.mean_evals_to_optimum is None else f"{r.mean_evals_to_optimum:.1f}"
        mark = " *" if r.marked else ""
        flag = " (single run)" if r.single_sample else ""
        lines.append(f"{r.problem:<16}{r.algorithm:<16}{r.repetitions:>5}{r.best:>12.4g}{r.mean:>12.4g}"
                     f"{r.median:>12.4g}{r.std:>10.3g}{evals:>9}{mark}{flag}")
    return "\n".join(lines)


def cmd_run(args) -> int:
    specs = build_specs(args)
    failed = 0
    for spec in specs:
        try:
            result = run_experiment(spec)
        except Exception as exc:   # one failing experiment must not hide the others
            logging.getLogger(__name__).error("%s failed: %s", spec.problem, exc)
            failed += 1
            continue
        print(format_rows(result.rows))
    return 1 if failed else 0


def cmd_summarize(args) -> int:
    rows = summarize_dir(args.input)
    if not rows:
        print(f"no runs found under {args.input}", file=sys.stderr)
        return 1
    write_summary(Path(args.input), rows)
    print(format_rows(rows))
    return 0


def cmd_compare(args) -> int:
    groups = load_runs(args.input)
    rows = summarize_dir(args.input)
    if not rows:
        print(f"no runs found under {args.input}", file=sys.stderr)
        return 1
    report = []
    for problem in sorted({r.problem for r in rows}):
        prow = [r for r in rows if r.problem == problem]
        sense = groups[(problem, prow[0].algorithm)][0].sense
        sign = -1 if sense == Sense.MAXIMIZE else 1
        best = min(prow, key=lambda r: sign * r.mean)
        print(f"{problem}: best mean {best.algorithm} ({best.mean:.4g})")
        for r in prow:
            if r is best:
                continue
            a = [lg.best_objective for lg in groups[(problem, r.algorithm)]]
            b = [lg.best_objective for lg in groups[(problem, best.algorithm)]]
            try:
                p = wilcoxon_rank_sum(a, b)
            except ValueError:
                p = None
            verdict = "n/a" if p is None else ("different" if p < args.alpha else "not different")
            print(f"  {r.algorithm:<16} mean {r.mean:<12.4g} p = {p if p is None else round(p, 5)}  {verdict}")
            report.append({"problem": problem, "algorithm": r.algorithm, "best": best.algorithm, "p": p})
    (Path(args.input) / "compare.json").write_text(json.dumps(report, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="samadiego", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run seeded repetitions of one or more algorithms")
    run.add_argument("--config", help="YAML/JSON file with one experiment per entry")
    run.add_argument("--problem", help="problem spec such as ising2d:25 or rosenbrock:15")
    run.add_argument("--algo", help="comma-separated: sama-diego-pv, sama-diego-ei, mies, ea-1p10, ga-1pll, random")
    run.add_argument("--budget", type=int)
    run.add_argument("--reps", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--infill", choices=["pv", "ei"])
    run.add_argument("--parallel", type=int)
    run.add_argument("--time-limit", dest="time_limit", type=float)
    run.add_argument("--n-init", dest="n_init", type=int)
    run.add_argument("--search-budget", dest="search_budget", type=int)
    run.add_argument("--stop-at-optimum", dest="stop_at_optimum", action="store_true", default=None)
    run.add_argument("--out")
    run.set_defaults(func=cmd_run)

    summ = sub.add_parser("summarize", help="recompute summary statistics from saved runs")
    summ.add_argument("--in", dest="input", required=True)
    summ.set_defaults(func=cmd_summarize)

    cmp_ = sub.add_parser("compare", help="Wilcoxon rank-sum comparison against the best mean")
    cmp_.add_argument("--in", dest="input", required=True)
    cmp_.add_argument("--alpha", type=float, default=0.05)
    cmp_.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
