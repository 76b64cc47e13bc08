"""
Discrete Fréchet distance and its class-normalized average.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from gpdmm.exceptions import DegenerateClassError, ShapeError, UsageError

logger = logging.getLogger(__name__)


def _trajectory(s, label: str) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim == 1:
        s = s[:, None]
    if s.ndim != 2 or s.shape[0] == 0:
        raise ShapeError(f"La trayectoria {label} está vacía o mal formada, forma {s.shape}")
    return s


def discrete_frechet(s1, s2) -> float:
    """
    Discrete Fréchet distance between two sampled curves.

    Dynamic program over the coupling lattice with Euclidean point distance:
    C[i, j] = max(d(i, j), min(C[i-1, j], C[i, j-1], C[i-1, j-1])).

    Raises:
        ShapeError: If either trajectory is empty or feature counts differ
    """
    P = _trajectory(s1, "s1")
    Q = _trajectory(s2, "s2")
    if P.shape[1] != Q.shape[1]:
        raise ShapeError(f"Las trayectorias tienen {P.shape[1]} y {Q.shape[1]} rasgos")
    dist = cdist(P, Q)
    p, q = dist.shape
    C = np.empty((p, q))
    C[0, 0] = dist[0, 0]
    for i in range(1, p):
        C[i, 0] = max(C[i - 1, 0], dist[i, 0])
    for j in range(1, q):
        C[0, j] = max(C[0, j - 1], dist[0, j])
    for i in range(1, p):
        for j in range(1, q):
            C[i, j] = max(min(C[i - 1, j], C[i, j - 1], C[i - 1, j - 1]), dist[i, j])
    return float(C[-1, -1])


def class_normalizer(class_sequences: Sequence) -> float:
    """
    Largest pairwise Fréchet distance inside a class's test set.

    Raises:
        DegenerateClassError: If fewer than two sequences are given or all coincide
    """
    if len(class_sequences) < 2:
        raise DegenerateClassError(f"Se necesitan al menos 2 secuencias para normalizar, hay {len(class_sequences)}")
    value = max(discrete_frechet(a, b) for a, b in combinations(class_sequences, 2))
    if value <= 0:
        raise DegenerateClassError("Todas las secuencias de la clase son idénticas; normalizador nulo")
    return value


def normalized_frechet(s_g, s_t, class_sequences: Sequence = (), normalizer: Optional[float] = None) -> float:
    """
    d_F(s_g, s_t) divided by the largest pairwise d_F within the class.

    Args:
        s_g: generated trajectory
        s_t: ground-truth trajectory
        class_sequences: the class's test sequences
        normalizer: precomputed class_normalizer(class_sequences)
    """
    if normalizer is None:
        normalizer = class_normalizer(class_sequences)
    elif normalizer <= 0:
        raise DegenerateClassError(f"Normalizador no positivo: {normalizer}")
    return discrete_frechet(s_g, s_t) / normalizer


@dataclass(frozen=True)
class FrechetAverage:
    # None when no class has a correctly classified pair
    value: Optional[float]
    per_class: Dict[str, float] = field(default_factory=dict)
    excluded: List[str] = field(default_factory=list)

    @property
    def defined(self) -> bool:
        return self.value is not None


def frechet_avg(correctly_classified: Mapping[str, Sequence[Tuple[np.ndarray, np.ndarray]]],
                class_sequences: Mapping[str, Sequence]) -> FrechetAverage:
    """
    Mean over classes of the mean normalized Fréchet distance of each class's
    correctly classified (generated, truth remainder) pairs.

    Classes with no correct pair are left out of the outer mean and listed
    in ``excluded``; when every class is left out the value is None.
    """
    if not correctly_classified and not class_sequences:
        raise UsageError("frechet_avg necesita al menos una clase")
    per_class: Dict[str, float] = {}
    excluded: List[str] = []
    labels = list(dict.fromkeys(list(class_sequences) + list(correctly_classified)))
    for label in labels:
        pairs = correctly_classified.get(label, [])
        if not pairs:
            excluded.append(label)
            continue
        normalizer = class_normalizer(class_sequences[label])
        per_class[label] = float(np.mean([normalized_frechet(g, t, normalizer=normalizer) for g, t in pairs]))
    if not per_class:
        logger.warning("⚠️  Ninguna secuencia clasificada correctamente: D_avg indefinido")
        return FrechetAverage(value=None, per_class={}, excluded=excluded)
    return FrechetAverage(value=float(np.mean(list(per_class.values()))), per_class=per_class, excluded=excluded)
