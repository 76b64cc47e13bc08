"""
Pydantic models for covariance kernel hyperparameters
"""
from enum import Enum
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator


class KernelKind(str, Enum):
    """Kernel families available to every GP in the model"""

    RBF = "rbf"
    LINEAR = "linear"
    RBF_PLUS_LINEAR = "rbf_plus_linear"
    BIAS = "bias"
    WHITE = "white"


# Hyperparameters read by each family, in vectorization order
KIND_PARAMS: Dict[KernelKind, Tuple[str, ...]] = {
    KernelKind.RBF: ("variance", "lengthscale"),
    KernelKind.LINEAR: ("linear_variance",),
    KernelKind.RBF_PLUS_LINEAR: ("variance", "lengthscale", "linear_variance"),
    KernelKind.BIAS: ("variance",),
    KernelKind.WHITE: ("noise",),
}


class KernelSpec(BaseModel):
    """One kernel component"""

    kind: KernelKind = Field(..., description="Kernel family")
    variance: float = Field(1.0, gt=0, description="Signal variance (rbf, bias)")
    lengthscale: float = Field(1.0, gt=0, description="RBF lengthscale")
    linear_variance: float = Field(1.0, gt=0, description="Linear kernel scale")
    noise: float = Field(0.0, ge=0, description="White-noise variance")

    model_config = {"frozen": True}


class KernelSum(BaseModel):
    """
    Sum of kernel components, one per family.

    Hyperparameters are named ``<kind>.<param>`` (e.g. ``rbf.lengthscale``).
    """

    parts: List[KernelSpec] = Field(..., min_length=1)

    model_config = {"frozen": True}

    @field_validator('parts')
    @classmethod
    def validate_unique_kinds(cls, v):
        kinds = [p.kind for p in v]
        if len(set(kinds)) != len(kinds):
            raise ValueError(f"Cada familia de kernel puede aparecer una sola vez: {kinds}")
        return v

    @property
    def noise(self) -> float:
        return sum(p.noise for p in self.parts if p.kind == KernelKind.WHITE)

    def without_noise(self) -> "KernelSum":
        """Copy of the kernel with the white component removed"""
        parts = [p for p in self.parts if p.kind != KernelKind.WHITE]
        if not parts:
            parts = [KernelSpec(kind=KernelKind.BIAS, variance=1e-12)]
        return KernelSum(parts=parts)

    def param_names(self) -> List[str]:
        return [f"{p.kind.value}.{name}" for p in self.parts for name in KIND_PARAMS[p.kind]]

    def get_params(self) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.parts for name in KIND_PARAMS[p.kind]], dtype=float)

    def with_params(self, values) -> "KernelSum":
        """Return a copy with the hyperparameters replaced, in param_names() order"""
        values = list(np.asarray(values, dtype=float))
        if len(values) != len(self.param_names()):
            raise ValueError(f"Se esperaban {len(self.param_names())} hiperparámetros, recibidos {len(values)}")
        parts = []
        for p in self.parts:
            update = {name: float(values.pop(0)) for name in KIND_PARAMS[p.kind]}
            parts.append(p.model_copy(update=update))
        return KernelSum(parts=parts)

    def log_params(self) -> np.ndarray:
        return np.log(np.maximum(self.get_params(), 1e-300))

    def from_log_params(self, values) -> "KernelSum":
        return self.with_params(np.exp(np.asarray(values, dtype=float)))


def emission_kernel(variance: float = 1.0, lengthscale: float = 1.0,
                    bias: float = 0.1, noise: float = 0.01) -> KernelSum:
    """Default emission kernel: rbf + bias + white"""
    return KernelSum(parts=[
        KernelSpec(kind=KernelKind.RBF, variance=variance, lengthscale=lengthscale),
        KernelSpec(kind=KernelKind.BIAS, variance=bias),
        KernelSpec(kind=KernelKind.WHITE, noise=noise),
    ])


def dynamics_kernel(variance: float = 1.0, lengthscale: float = 1.0,
                    linear_variance: float = 0.1, noise: float = 0.01) -> KernelSum:
    """Default dynamics kernel: rbf_plus_linear + white"""
    return KernelSum(parts=[
        KernelSpec(kind=KernelKind.RBF_PLUS_LINEAR, variance=variance,
                   lengthscale=lengthscale, linear_variance=linear_variance),
        KernelSpec(kind=KernelKind.WHITE, noise=noise),
    ])
