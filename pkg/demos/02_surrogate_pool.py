"""
The surrogate pool up close
===========================

Fit all 31 model configurations to a small Ising data set, compare them on
held-out points and look at the predictive uncertainty each family offers.
"""

import numpy as np

from samadiego import make_problem, standardize, verify_models
from samadiego.infill import InfillSpec, expected_improvement, infill_score
from samadiego.sampling import lhs_sample
from samadiego.surrogates import default_pool, fit, predict_with_uncertainty
from samadiego.types import Infill, to_minimize

problem = make_problem("ising2d:16")
X = lhs_sample(problem.space, 40, seed=0)
Y = np.array([to_minimize(problem.evaluate(x), problem.sense) for x in X])

# %%
# Verification: 70/30 split, every config fitted on the 70 %, ranked by R^2
# on the 30 %. Only the best seven stay in the pool.
pool = verify_models(default_pool(), X, Y, problem.space, parallel=7, seed=0)
for entry in pool.entries:
    print(f"{entry.config.id:<28} R^2 {entry.r2:+.3f}  fit {entry.fit_seconds * 1e3:.1f} ms")
print(f"{len(pool.rejected)} configurations rejected")

# %%
# Refit the winner on all standardized data and score a few fresh designs by
# prediction value and by expected improvement.
Ys, stats = standardize(Y)
model = fit(pool.configs[0], X, Ys, problem.space)
fresh = lhs_sample(problem.space, 5, seed=1)
incumbent = float(Ys.min())
if model.supports_uncertainty:
    mean, sd = predict_with_uncertainty(model, fresh)
    for m, s in zip(mean, sd):
        print(f"mean {m:+.3f}  sd {s:.3f}  EI {expected_improvement(m, s, incumbent):.4f}")
print("PV scores", np.round(infill_score(InfillSpec(Infill.PV), model, fresh), 3))
