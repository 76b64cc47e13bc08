"""
Geometry-embedded latent initialization
"""
from .geometry import LatentInit, build_latent_init, fourier_features, pca_features, progression

__all__ = ["LatentInit", "progression", "fourier_features", "pca_features", "build_latent_init"]
