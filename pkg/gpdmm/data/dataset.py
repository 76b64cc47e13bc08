"""
In-memory sequence and dataset containers
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from gpdmm.exceptions import LoadError, MissingClassError, ShapeError, TooShortError


@dataclass(frozen=True)
class Sequence:
    """One labeled trajectory: rows are time steps, columns are joint angles"""

    values: np.ndarray
    class_label: str
    source_id: str
    dt: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ShapeError(f"{self.source_id}: se esperaba una matriz tiempo x rasgos, forma {values.shape}")
        if values.shape[0] < 2:
            raise TooShortError(f"{self.source_id}: se necesitan al menos 2 pasos, hay {values.shape[0]}")
        if values.shape[1] < 1:
            raise ShapeError(f"{self.source_id}: la secuencia no tiene rasgos")
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            row, col = bad[0]
            raise LoadError(f"{self.source_id}: valor no finito en fila {row + 1}, columna {col + 1}")
        if self.dt <= 0:
            raise ShapeError(f"{self.source_id}: dt debe ser positivo, recibido {self.dt}")
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def feature_count(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class Dataset:
    """Sequences sharing feature count D and a common length"""

    sequences: List[Sequence]
    classes: List[str]
    name: str = "dataset"
    unit: str = "rad"
    metadata: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.sequences:
            raise MissingClassError("El dataset no contiene secuencias")
        D = self.sequences[0].feature_count
        for seq in self.sequences:
            if seq.feature_count != D:
                raise ShapeError(
                    f"{seq.source_id}: {seq.feature_count} rasgos, el dataset tiene {D}"
                )
            if seq.class_label not in self.classes:
                raise LoadError(f"{seq.source_id}: clase desconocida '{seq.class_label}'")
        for label in self.classes:
            if not any(seq.class_label == label for seq in self.sequences):
                raise MissingClassError(f"La clase '{label}' no tiene secuencias")

    @property
    def D(self) -> int:
        return self.sequences[0].feature_count

    @property
    def length(self) -> Optional[int]:
        """Common sequence length, or None when lengths differ"""
        lengths = {seq.length for seq in self.sequences}
        return lengths.pop() if len(lengths) == 1 else None

    @property
    def dt(self) -> float:
        return self.sequences[0].dt

    def class_index(self, label: str) -> int:
        return self.classes.index(label)

    def labels(self) -> List[int]:
        return [self.class_index(seq.class_label) for seq in self.sequences]

    def indices_of(self, label: str) -> List[int]:
        return [i for i, seq in enumerate(self.sequences) if seq.class_label == label]

    def subset(self, indices: List[int]) -> "Dataset":
        """Dataset restricted to the given sequence indices, class order preserved"""
        chosen = [self.sequences[i] for i in indices]
        present = [c for c in self.classes if any(s.class_label == c for s in chosen)]
        return Dataset(sequences=chosen, classes=present, name=self.name,
                       unit=self.unit, metadata=dict(self.metadata))
