"""
Pydantic models for classification results and evaluation reports
"""
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class ClassificationResult(BaseModel):
    """Bayes posterior over the experts for one observed prefix"""

    posterior: List[float] = Field(..., description="p(a | X*) por clase, suma 1")
    predicted: int = Field(..., ge=0, description="Índice de la clase ganadora")
    predicted_label: str = Field(..., description="Etiqueta de la clase ganadora")
    log_scores: List[float] = Field(..., description="log p(X* | a) por experto")
    prefix_length: int = Field(..., ge=1)
    projection_converged: bool = Field(True, description="False si la proyección latente no convergió")

    model_config = {
        "json_schema_extra": {
            "example": {
                "posterior": [0.97, 0.03],
                "predicted": 0,
                "predicted_label": "walk",
                "log_scores": [-12.4, -15.9],
                "prefix_length": 48,
                "projection_converged": True,
            }
        }
    }


class ClassMetrics(BaseModel):
    """Per-class slice of the evaluation"""

    label: str
    test_count: int = Field(..., ge=0)
    correct_count: int = Field(..., ge=0)
    f1: float = Field(..., ge=0, le=1)
    frechet_avg: Optional[float] = Field(None, ge=0, description="None sin clasificaciones correctas")
    dampening_ratio: Optional[float] = Field(None, description="Puede ser inf si la generación no se mueve")
    ldj_ratio: Optional[float] = None

    model_config = {"ser_json_inf_nan": "constants"}


class MetricsReport(BaseModel):
    """Overall and per-class classification and generation scores"""

    f1_macro: float = Field(..., ge=0, le=1)
    frechet_avg: Optional[float] = Field(None, ge=0, description="D_avg; None cuando no está definido")
    dampening_ratio: Optional[float] = None
    ldj_ratio: Optional[float] = None
    per_class: Dict[str, ClassMetrics] = Field(default_factory=dict)
    excluded_classes: List[str] = Field(default_factory=list, description="Clases sin aciertos, fuera de D_avg")
    test_count: int = Field(0, ge=0)
    prefix_length: int = Field(0, ge=0)
    prefix_fraction: float = Field(0.0, ge=0, le=1)
    warnings: List[str] = Field(default_factory=list)

    model_config = {"ser_json_inf_nan": "constants"}

    @property
    def frechet_defined(self) -> bool:
        return self.frechet_avg is not None

    def to_text(self) -> str:
        """Aligned plain-text table"""
        lines = [
            f"{'clase':<16} {'n':>4} {'ok':>4} {'F1':>7} {'D_avg':>9} {'amort.':>9} {'LDJ':>9}",
            "-" * 64,
        ]
        for label, row in self.per_class.items():
            lines.append(
                f"{label:<16} {row.test_count:>4} {row.correct_count:>4} {row.f1:>7.4f} "
                f"{_fmt(row.frechet_avg):>9} {_fmt(row.dampening_ratio):>9} {_fmt(row.ldj_ratio):>9}"
            )
        lines.append("-" * 64)
        lines.append(
            f"{'global':<16} {self.test_count:>4} {'':>4} {self.f1_macro:>7.4f} "
            f"{_fmt(self.frechet_avg):>9} {_fmt(self.dampening_ratio):>9} {_fmt(self.ldj_ratio):>9}"
        )
        if self.excluded_classes:
            lines.append(f"excluidas de D_avg: {', '.join(self.excluded_classes)}")
        for warning in self.warnings:
            lines.append(f"aviso: {warning}")
        return "\n".join(lines) + "\n"


class MetricSummary(BaseModel):
    mean: Optional[float] = None
    std: Optional[float] = None
    count: int = 0


class IterationReport(BaseModel):
    """One MCCV resample: chosen stopping round, validation and test scores"""

    iteration: int = Field(..., ge=0)
    seed: int
    best_round: int = Field(..., ge=0)
    rounds_run: int = Field(..., ge=0)
    validation_score: float
    validation: MetricsReport
    test: MetricsReport


class AggregateReport(BaseModel):
    """Mean and standard deviation of every metric across MCCV iterations"""

    iterations: int = Field(..., ge=1)
    validation_score: MetricSummary
    test: Dict[str, MetricSummary]
    validation: Dict[str, MetricSummary]
    best_rounds: List[int]


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return "n/d"
    return f"{value:.4f}"


class LeaderboardEntry(BaseModel):
    """One sampled configuration and its MCCV validation scores"""

    rank: int = Field(0, ge=0)
    candidate: int = Field(..., ge=0)
    params: Dict[str, Optional[float]]
    validation_f1: Optional[float] = None
    validation_frechet: Optional[float] = None
    test_f1: Optional[float] = None
    test_frechet: Optional[float] = None
    error: Optional[str] = Field(None, description="Mensaje si la configuración falló")
