"""
Pydantic schemas: kernels, latent and training options, data manifests,
run configuration, reports and API payloads
"""
from .api import FramesRequest, GeneratedFrame, GenerateRequest, GenerateResponse
from .data import Manifest, ManifestClass, SynthClassSpec, SynthSpec, default_synth_spec, overlapping_synth_spec
from .kernel import KernelSpec, KernelSum
from .latent import Geometry, LatentConfig, TrainOptions
from .reports import (
    AggregateReport, ClassificationResult, ClassMetrics, IterationReport, LeaderboardEntry, MetricsReport,
    MetricSummary,
)
from .run_config import RunConfig, SearchSpace, resolve_config

__all__ = [
    "FramesRequest", "GenerateRequest", "GenerateResponse", "GeneratedFrame",
    "Manifest", "ManifestClass", "SynthSpec", "SynthClassSpec", "default_synth_spec", "overlapping_synth_spec",
    "KernelSpec", "KernelSum", "Geometry", "LatentConfig", "TrainOptions",
    "ClassificationResult", "ClassMetrics", "MetricsReport", "MetricSummary", "IterationReport",
    "AggregateReport", "LeaderboardEntry",
    "RunConfig", "SearchSpace", "resolve_config",
]
