"""
Experiment harnesses: held-out evaluation, MCCV and hyperparameter search
"""
from .evaluation import SequenceOutcome, evaluate, validation_key
from .mccv import aggregate, run_iteration, run_mccv
from .search import run_search, sample_candidates

__all__ = [
    "SequenceOutcome", "evaluate", "validation_key",
    "run_iteration", "run_mccv", "aggregate",
    "run_search", "sample_candidates",
]
