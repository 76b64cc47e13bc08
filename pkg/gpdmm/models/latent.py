"""
Pydantic models for latent-space and training configuration
"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field

from gpdmm.models.kernel import KernelSum


class Geometry(str, Enum):
    """Geometric features placed in front of the reduction features"""

    FOURIER = "fourier"
    NONE = "none"


class LatentConfig(BaseModel):
    """Latent initialization: Fourier order m, reduction dims r and Markov order"""

    fourier_order: int = Field(2, ge=1, description="Fourier order m")
    include_constant: bool = Field(True, description="Prepend the constant Fourier column")
    reduction_dims: int = Field(3, ge=1, description="PCA dimensions r")
    markov_order: int = Field(1, ge=1, le=2, description="Autoregressive order of the dynamics")
    geometry: Geometry = Field(Geometry.FOURIER, description="'none' gives a PCA-only initialization")
    epsilon: Optional[float] = Field(None, gt=0, description="Velocity guard; default 1e-3 x mean velocity")

    model_config = {"frozen": True}

    @property
    def fourier_dims(self) -> int:
        if self.geometry == Geometry.NONE:
            return 0
        return 2 * self.fourier_order + (1 if self.include_constant else 0)

    @property
    def latent_dim(self) -> int:
        """Q = (2m+1) + r, or r alone without geometry"""
        return self.fourier_dims + self.reduction_dims


class TrainOptions(BaseModel):
    """Optimizer budgets and model variations for joint training"""

    rounds: int = Field(40, ge=0, description="Alternating emission/dynamics rounds")
    emission_steps: int = Field(50, ge=1)
    dynamics_steps: int = Field(50, ge=1)
    polish_steps: int = Field(200, ge=0, description="Final joint optimization iterations")
    tolerance: float = Field(1e-7, gt=0, description="Relative-improvement stop between rounds")

    emission_kernel: Optional[KernelSum] = Field(None, description="None derives a kernel from the data")
    dynamics_kernel: Optional[KernelSum] = Field(None, description="None derives a kernel from the latents")
    emission_variance_scale: float = Field(1.0, gt=0)
    dynamics_variance_scale: float = Field(1.0, gt=0)

    pooled_dynamics: bool = Field(False, description="One dynamical GP over every class")
    fitc_inducing: Optional[int] = Field(None, ge=1, description="Inducing points per expert (FITC)")
    fitc_steps: int = Field(100, ge=0)
    workers: int = Field(1, ge=1, description="Threads for per-expert fitting")

    model_config = {"frozen": True}
