"""Acquisition scores over standardized objectives in minimize sense.

Higher scores are better: prediction value (PV) scores a design by its
negated prediction, expected improvement (EI) by the expected amount its
normally distributed prediction undercuts the incumbent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import norm

from .surrogates import FittedSurrogate
from .types import Infill


def expected_improvement(g, sd, g_star):
    """Closed-form EI of a ``Normal(g, sd**2)`` prediction below ``g_star``.

    Accepts scalars or broadcastable arrays; ``sd == 0`` uses the exact limit
    ``max(g_star - g, 0)``.

    >>> expected_improvement(1.0, 0.0, 2.0)
    1.0
    >>> round(expected_improvement(0.0, 1.0, 0.0), 5)
    0.39894
    """
    g, sd, g_star = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (g, sd, g_star)))
    if not (np.isfinite(g).all() and np.isfinite(sd).all() and np.isfinite(g_star).all()):
        raise ValueError("expected_improvement needs finite inputs")
    if (sd < 0).any():
        raise ValueError("sd must be non-negative")
    scalar = g.ndim == 0
    gain = np.atleast_1d(g_star - g)
    sd = np.atleast_1d(sd)
    out = np.maximum(gain, 0.0)
    pos = sd > 0
    if pos.any():
        s = sd[pos]
        # sub-normal sd overflows z to +-inf, where the formula still has the right limit
        with np.errstate(over="ignore"):
            z = gain[pos] / s
            out[pos] = np.maximum(gain[pos] * norm.cdf(z) + s * norm.pdf(z), 0.0)
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class InfillSpec:
    """Which criterion to use; ``incumbent`` is the standardized best (EI only)."""

    kind: Infill = Infill.PV
    incumbent: Optional[float] = None

    def __post_init__(self):
        if self.kind is Infill.EI and self.incumbent is None:
            raise ValueError("EI needs a standardized incumbent")


def resolve(spec: InfillSpec, model: FittedSurrogate) -> tuple[InfillSpec, bool]:
    """The spec actually usable with ``model`` and whether it fell back to PV."""
    if spec.kind is Infill.EI and not model.supports_uncertainty:
        return InfillSpec(Infill.PV), True
    return spec, False


def infill_score(spec: InfillSpec, model: FittedSurrogate, X):
    """Score one design (float) or a batch (array); higher is better.

    EI on a model without uncertainty scores by PV instead; use ``resolve``
    to detect that case.
    """
    X = np.asarray(X)
    single = X.ndim == 1
    Xb = np.atleast_2d(X)
    spec, _ = resolve(spec, model)
    if spec.kind is Infill.PV:
        out = -model.predict(Xb)
    else:
        mean, sd = model.predict_with_uncertainty(Xb)
        out = expected_improvement(mean, sd, spec.incumbent)
    out = np.asarray(out, dtype=float)
    return float(out[0]) if single else out
