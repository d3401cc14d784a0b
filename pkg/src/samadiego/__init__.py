"""Surrogate-assisted optimization of discrete black-box problems with online model selection."""

from .manager import samadiego_run, standardize, verify_models, rank_models
from .problems import Problem, make_problem
from .types import Infill, RunConfig, RunLog, SearchSpace, Sense

__all__ = [
    "samadiego_run", "standardize", "verify_models", "rank_models",
    "Problem", "make_problem", "Infill", "RunConfig", "RunLog", "SearchSpace", "Sense",
]
__version__ = "0.1.0"
