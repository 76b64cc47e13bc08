"""
Versioned JSON model document ("GPDMM1").

Arrays are stored as shape plus flat data; floats are written with their
shortest round-trip representation, so save -> load -> save is byte-identical.
"""
import json
import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator

from gpdmm.core.kernels import kernel_eval
from gpdmm.core.linalg import factorize, psd_solve
from gpdmm.exceptions import LoadError
from gpdmm.gp.dynamics import build_dynamics
from gpdmm.gp.emission import EmissionModel
from gpdmm.gp.fitc import FITCState
from gpdmm.gp.mixture import TrainedGPDMM
from gpdmm.models.kernel import KernelSum
from gpdmm.models.latent import LatentConfig

logger = logging.getLogger(__name__)

MAGIC = "GPDMM1"


class ArrayDocument(BaseModel):
    shape: List[int]
    data: List[float]

    @classmethod
    def of(cls, array: np.ndarray) -> "ArrayDocument":
        array = np.asarray(array, dtype=float)
        return cls(shape=list(array.shape), data=[float(v) for v in array.ravel()])

    def to_array(self) -> np.ndarray:
        values = np.array(self.data, dtype=float)
        if values.size != int(np.prod(self.shape)):
            raise ValueError(f"{values.size} valores no llenan la forma {self.shape}")
        return values.reshape(self.shape)


class EmissionDocument(BaseModel):
    X: ArrayDocument
    Y_mean: ArrayDocument
    Y_centered: ArrayDocument
    kernel: KernelSum


class ExpertDocument(BaseModel):
    class_id: int = Field(..., ge=0)
    order: int = Field(..., ge=1, le=2)
    X_in: ArrayDocument
    X_out: ArrayDocument
    kernel: KernelSum
    inducing: Optional[ArrayDocument] = None


class ModelDocument(BaseModel):
    """Self-describing container of a trained mixture"""

    magic: str = MAGIC
    class_labels: List[str]
    priors: List[float]
    latent_config: LatentConfig
    bounds: List[int]
    sequence_classes: List[int]
    pooled: bool = False
    emission: EmissionDocument
    experts: List[ExpertDocument]

    @field_validator('magic')
    @classmethod
    def validate_magic(cls, v):
        if v != MAGIC:
            raise ValueError(f"Cabecera '{v}' desconocida; se esperaba '{MAGIC}'")
        return v


def to_document(model: TrainedGPDMM) -> ModelDocument:
    emission = model.emission
    return ModelDocument(
        class_labels=list(model.class_labels),
        priors=[float(p) for p in model.priors],
        latent_config=model.latent_config,
        bounds=list(model.bounds),
        sequence_classes=list(model.sequence_classes),
        pooled=model.pooled,
        emission=EmissionDocument(
            X=ArrayDocument.of(emission.X),
            Y_mean=ArrayDocument.of(emission.Y_mean),
            Y_centered=ArrayDocument.of(emission.Y_centered),
            kernel=emission.kernel,
        ),
        experts=[
            ExpertDocument(
                class_id=e.class_id, order=e.order, X_in=ArrayDocument.of(e.X_in),
                X_out=ArrayDocument.of(e.X_out), kernel=e.kernel,
                inducing=ArrayDocument.of(e.sparse.inducing) if e.sparse is not None else None,
            )
            for e in model.experts
        ],
    )


def from_document(doc: ModelDocument) -> TrainedGPDMM:
    Y_mean = doc.emission.Y_mean.to_array()
    Y_centered = doc.emission.Y_centered.to_array()
    X = doc.emission.X.to_array()
    # stored centering is reused as is
    gram = factorize(kernel_eval(doc.emission.kernel, X))
    emission = EmissionModel(X=X, Y_mean=Y_mean, Y_centered=Y_centered, kernel=doc.emission.kernel,
                             gram=gram, alpha_cache=psd_solve(gram, Y_centered))
    experts = []
    for e in doc.experts:
        sparse = FITCState(inducing=e.inducing.to_array()) if e.inducing is not None else None
        experts.append(build_dynamics(e.class_id, e.order, e.X_in.to_array(), e.X_out.to_array(),
                                      e.kernel, sparse=sparse))
    return TrainedGPDMM(emission=emission, experts=experts, priors=np.array(doc.priors, dtype=float),
                        latent_config=doc.latent_config, class_labels=list(doc.class_labels),
                        bounds=list(doc.bounds), sequence_classes=list(doc.sequence_classes), pooled=doc.pooled)


def dumps(model: TrainedGPDMM) -> str:
    """Serialize to a JSON string with sorted keys and a trailing newline"""
    payload = to_document(model).model_dump(mode="json")
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def loads(text: str) -> TrainedGPDMM:
    """
    Parse a model document.

    Raises:
        LoadError: If the text is not a valid GPDMM1 document
    """
    try:
        doc = ModelDocument.model_validate_json(text)
    except ValidationError as e:
        raise LoadError(f"Documento de modelo inválido: {e.errors()[0]['msg']}") from e
    try:
        return from_document(doc)
    except ValueError as e:
        raise LoadError(f"Documento de modelo inválido: {e}") from e


def save_model(model: TrainedGPDMM, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(model), encoding="utf-8", newline="\n")
    logger.info(f"💾 Modelo guardado en {path}")
    return path


def load_model(path: Union[str, Path]) -> TrainedGPDMM:
    path = Path(path)
    if not path.is_file():
        raise LoadError(f"Documento de modelo no encontrado: {path}")
    model = loads(path.read_text(encoding="utf-8"))
    logger.info(f"📂 Modelo cargado: {path} ({model.A} clases, D={model.D}, Q={model.Q})")
    return model
