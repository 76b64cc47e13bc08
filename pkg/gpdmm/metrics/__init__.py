"""
Evaluation metrics: F1, discrete Fréchet distance and its normalized
average, dampening and log dimensionless jerk
"""
from .classification import f1_score, per_class_f1
from .frechet import FrechetAverage, class_normalizer, discrete_frechet, frechet_avg, normalized_frechet
from .smoothness import dampening, default_window, ldj, ldj_ratio, mean_displacement

__all__ = [
    "f1_score", "per_class_f1",
    "discrete_frechet", "class_normalizer", "normalized_frechet", "frechet_avg", "FrechetAverage",
    "dampening", "mean_displacement", "default_window", "ldj", "ldj_ratio",
]
