"""
Pydantic models for run-level configuration
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, Field, ValidationError, field_validator

from gpdmm.config import settings
from gpdmm.exceptions import UsageError
from gpdmm.models.latent import LatentConfig, TrainOptions


class SearchSpace(BaseModel):
    """Ranges sampled by the random hyperparameter search"""

    fourier_order: List[int] = Field(default_factory=lambda: [1, 2, 3])
    reduction_dims: List[int] = Field(default_factory=lambda: [2, 3, 4])
    markov_order: List[int] = Field(default_factory=lambda: [1, 2])
    include_constant: List[bool] = Field(default_factory=lambda: [True, False])
    # log-uniform ranges for the initial kernel variances
    emission_variance_scale: List[float] = Field(default_factory=lambda: [0.5, 2.0], min_length=2, max_length=2)
    dynamics_variance_scale: List[float] = Field(default_factory=lambda: [0.5, 2.0], min_length=2, max_length=2)
    # None keeps the full GP
    fitc_inducing: List[Optional[int]] = Field(default_factory=lambda: [None])

    @field_validator('emission_variance_scale', 'dynamics_variance_scale')
    @classmethod
    def validate_range(cls, v):
        lo, hi = v
        if not 0 < lo <= hi:
            raise ValueError(f"Rango inválido {v}: se requiere 0 < mín <= máx")
        return v

    @field_validator('markov_order')
    @classmethod
    def validate_orders(cls, v):
        if any(o not in (1, 2) for o in v):
            raise ValueError(f"El orden de Markov debe ser 1 o 2: {v}")
        return v

    def empty_axes(self) -> List[str]:
        return [name for name in ("fourier_order", "reduction_dims", "markov_order", "include_constant",
                                  "fitc_inducing") if not getattr(self, name)]


class RunConfig(BaseModel):
    """Everything a run needs; with a fixed seed a run is fully reproducible"""

    manifest: Optional[str] = Field(None, description="Ruta del manifiesto del dataset")
    latent: LatentConfig = Field(default_factory=LatentConfig)
    train: TrainOptions = Field(default_factory=TrainOptions)

    prefix_fraction: float = Field(0.4, gt=0, lt=1, description="Fracción T usada para clasificar")
    dampening_window: Optional[int] = Field(None, ge=1, description="None usa el 10% de la longitud")
    n_validation: int = Field(2, ge=0, description="Secuencias de validación por clase")
    n_test: int = Field(3, ge=1, description="Secuencias de prueba por clase")

    iterations: int = Field(3, ge=1, description="Remuestreos MCCV")
    patience: int = Field(5, ge=1, description="Rondas sin mejora antes de detener")
    search: SearchSpace = Field(default_factory=SearchSpace)
    budget: int = Field(8, ge=1, description="Configuraciones evaluadas por la búsqueda")

    seed: int = Field(0, ge=0)
    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    plots: bool = False
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)

    def require_manifest(self) -> str:
        if not self.manifest:
            raise UsageError("Falta el manifiesto del dataset (--manifest o clave 'manifest')")
        return self.manifest


# long-form CLI flag -> dotted path inside RunConfig
FLAG_PATHS: Dict[str, str] = {
    "manifest": "manifest",
    "fourier_order": "latent.fourier_order",
    "include_constant": "latent.include_constant",
    "reduction_dims": "latent.reduction_dims",
    "markov_order": "latent.markov_order",
    "geometry": "latent.geometry",
    "epsilon": "latent.epsilon",
    "rounds": "train.rounds",
    "emission_steps": "train.emission_steps",
    "dynamics_steps": "train.dynamics_steps",
    "polish_steps": "train.polish_steps",
    "tolerance": "train.tolerance",
    "emission_variance_scale": "train.emission_variance_scale",
    "dynamics_variance_scale": "train.dynamics_variance_scale",
    "pooled_dynamics": "train.pooled_dynamics",
    "fitc_inducing": "train.fitc_inducing",
    "fitc_steps": "train.fitc_steps",
    "prefix_fraction": "prefix_fraction",
    "dampening_window": "dampening_window",
    "n_validation": "n_validation",
    "n_test": "n_test",
    "iterations": "iterations",
    "patience": "patience",
    "budget": "budget",
    "seed": "seed",
    "output_dir": "output_dir",
    "plots": "plots",
    "workers": "workers",
}


def _set_path(data: Dict[str, Any], dotted: str, value: Any) -> None:
    node = data
    keys = dotted.split(".")
    for key in keys[:-1]:
        node = node.setdefault(key, {})
    node[keys[-1]] = value


def resolve_config(path: Union[str, Path, None] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Load a JSON config file and apply flag overrides on top.

    Raises:
        UsageError: If the file is unreadable or any value fails validation,
            naming the offending field
    """
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise UsageError(f"Archivo de configuración no encontrado: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}: JSON inválido ({e})") from e
    for flag, value in (overrides or {}).items():
        if value is None:
            continue
        _set_path(data, FLAG_PATHS[flag], value)
    # workers flow into expert fitting too
    if "workers" in data:
        data.setdefault("train", {}).setdefault("workers", data["workers"])
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        field = ".".join(str(p) for p in err["loc"])
        raise UsageError(f"Configuración inválida en '{field}': {err['msg']}") from e
