"""
Gaussian-process models: shared emission GP, per-class dynamical experts,
their FITC approximation and the mixture that gates them
"""
from .dynamics import DynamicsModel, dynamics_log_likelihood, fitc_fit, rollout, sequence_score
from .emission import EmissionModel, ProjectionInit, emission_gradients, emission_log_likelihood, emission_predict, infer_latent
from .mixture import TrainedGPDMM, classify, continue_prefix, generate, prefix_length, train
from .serialization import MAGIC, load_model, save_model

__all__ = [
    "EmissionModel", "ProjectionInit", "emission_log_likelihood", "emission_gradients",
    "emission_predict", "infer_latent",
    "DynamicsModel", "dynamics_log_likelihood", "sequence_score", "rollout", "fitc_fit",
    "TrainedGPDMM", "train", "classify", "generate", "continue_prefix", "prefix_length",
    "MAGIC", "save_model", "load_model",
]
