"""
A small benchmark with statistics
=================================

Repeat SAMA-DiEGO and two baselines a few times on one problem, then compare
the final values with the Wilcoxon rank-sum test. The same thing is available
from the command line::

    samadiego run --config demos/experiments.yaml
    samadiego compare --in demo_out
"""

import tempfile

from samadiego.harness import ExperimentSpec, run_experiment, summarize_dir
from samadiego.stats import wilcoxon_rank_sum

out = tempfile.mkdtemp(prefix="samadiego_demo_")
spec = ExperimentSpec("ising2d:25", ["sama-diego-pv", "ea-1p10", "random"], budget=100,
                      repetitions=3, seed=0, out=out)
result = run_experiment(spec)

# %%
# One summary row per algorithm; a marked row is the best mean or not
# significantly different from it.
for row in result.rows:
    print(f"{row.algorithm:<14} mean {row.mean:6.2f}  std {row.std:5.2f}  "
          f"evals to optimum {row.mean_evals_to_optimum:6.1f}  {'*' if row.marked else ''}")

finals = {a: [lg.best_objective for lg in logs] for a, logs in result.logs.items()}
print("p(sama vs ea) =", wilcoxon_rank_sum(finals["sama-diego-pv"], finals["ea-1p10"]))

# %%
# Everything was persisted; the summary can be rebuilt from disk alone.
by_algorithm = lambda rows: {r.algorithm: r.as_dict() for r in rows}
assert by_algorithm(summarize_dir(out)) == by_algorithm(result.rows)
print("runs stored under", out)
