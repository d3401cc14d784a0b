"""
A first optimization run
========================

Maximize the one-dimensional Ising ring on 25 bits with a budget of 120
real evaluations. The run starts from a 25-point Latin hypercube design,
keeps the seven best-validating surrogate models, and then lets the model
that predicted the latest evaluation best propose the next design.
"""

from collections import Counter

from samadiego import RunConfig, make_problem, samadiego_run

problem = make_problem("ising1d:25")
cfg = RunConfig(budget=120, n_init=25, infill="pv", seed=1)
log = samadiego_run(problem, cfg, stop_at_optimum=True)

# %%
# Every real evaluation is one record: design, objective, running best and
# the model that proposed it ("lhs" marks the initial design).
for rec in log.records[24:30]:
    print(rec.index, "".join(map(str, rec.design)), rec.objective, rec.best_so_far, rec.model_id)

print(f"\nbest {log.best_objective} of {problem.known_optimum}, first hit at evaluation {log.evals_to_optimum()}")

# %%
# The pool kept after verification, with held-out R^2, and how often each
# member was the one proposing designs.
for model_id, r2 in zip(log.notes["pool"], log.notes["pool_r2"]):
    print(f"{model_id:<28} R^2 {r2:+.3f}")
print(Counter(r.model_id for r in log.records if r.model_id != "lhs").most_common())
