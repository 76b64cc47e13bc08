"""
Pydantic models for dataset manifests and synthetic-motion descriptors
"""
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator


class ManifestClass(BaseModel):
    """One class of the manifest and its sequence files"""

    label: str = Field(..., min_length=1, description="Etiqueta de la clase")
    files: List[str] = Field(..., min_length=1, description="Archivos CSV relativos al manifiesto")


class Manifest(BaseModel):
    """Dataset manifest: metadata plus one CSV file per sequence"""

    dataset_name: str = Field(..., min_length=1)
    feature_count: int = Field(..., ge=1, description="Rasgos (ángulos articulares) por paso")
    target_length: int = Field(..., ge=2, description="Longitud común tras el remuestreo")
    dt: float = Field(..., gt=0, description="Paso temporal en segundos")
    unit: str = Field("rad", description="Unidad angular declarada; no se convierte")
    classes: List[ManifestClass] = Field(..., min_length=1)

    @field_validator('classes')
    @classmethod
    def validate_unique_labels(cls, v):
        labels = [c.label for c in v]
        if len(set(labels)) != len(labels):
            raise ValueError(f"Etiquetas de clase repetidas: {labels}")
        return v

    model_config = {
        "json_schema_extra": {
            "example": {
                "dataset_name": "synthetic",
                "feature_count": 12,
                "target_length": 120,
                "dt": 0.0333,
                "unit": "rad",
                "classes": [{"label": "walk", "files": ["walk_00.csv", "walk_01.csv"]}],
            }
        }
    }


class SynthClassSpec(BaseModel):
    """One synthetic motion class: a mixture of sinusoids with class-specific frequencies"""

    label: str = Field(..., min_length=1)
    frequencies: List[float] = Field(..., min_length=1, description="Ciclos por secuencia")
    amplitude: float = Field(1.0, gt=0)
    phase: float = Field(0.0, description="Fase base en radianes")


class SynthSpec(BaseModel):
    """Synthetic dataset descriptor"""

    name: str = "synthetic"
    classes: List[SynthClassSpec] = Field(..., min_length=1)
    feature_count: int = Field(12, ge=1)
    length: int = Field(120, ge=4)
    trials: int = Field(6, ge=1, description="Secuencias por clase")
    noise: float = Field(0.01, ge=0, description="Desviación del ruido gaussiano por muestra")
    variation: Optional[float] = Field(None, ge=0, description="Variación entre ensayos; None usa 5 x noise")
    dt: float = Field(1.0 / 30.0, gt=0)
    unit: str = "rad"

    @model_validator(mode='after')
    def validate_labels(self):
        labels = [c.label for c in self.classes]
        if len(set(labels)) != len(labels):
            raise ValueError(f"Etiquetas de clase repetidas: {labels}")
        return self

    @property
    def trial_variation(self) -> float:
        return 5.0 * self.noise if self.variation is None else self.variation


def default_synth_spec(classes: int = 4, feature_count: int = 12, length: int = 120, trials: int = 6,
                       noise: float = 0.01, variation: Optional[float] = None, prefix: str = "motion") -> SynthSpec:
    """Well-separated classes: class k uses base frequency k+1 plus a harmonic"""
    return SynthSpec(
        classes=[
            SynthClassSpec(label=f"{prefix}_{k}", frequencies=[k + 1.0, 2.0 * (k + 1)],
                           amplitude=1.0 + 0.25 * k, phase=0.7 * k)
            for k in range(classes)
        ],
        feature_count=feature_count, length=length, trials=trials, noise=noise, variation=variation,
    )


def overlapping_synth_spec(feature_count: int = 12, length: int = 120, trials: int = 6,
                           noise: float = 0.02, prefix: str = "overlap") -> SynthSpec:
    """Harder suite: four classes sharing a base frequency and differing in their harmonic"""
    return SynthSpec(
        name="synthetic-overlap",
        classes=[
            SynthClassSpec(label=f"{prefix}_{k}", frequencies=[1.0, 1.5 + 0.5 * k], amplitude=1.0, phase=0.3 * k)
            for k in range(4)
        ],
        feature_count=feature_count, length=length, trials=trials, noise=noise,
    )
