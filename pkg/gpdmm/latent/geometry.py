"""
Geometry-embedded latent initialization.

A per-sequence progression theta runs from 0 to 2*pi with steps inversely
proportional to velocity; Fourier features of theta form X_G, PCA scores
of the stacked observations form X_R, and X = [X_G, X_R].
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from sklearn.decomposition import PCA

from gpdmm.data.dataset import Dataset, Sequence
from gpdmm.exceptions import ShapeError, TooShortError, UsageError
from gpdmm.models.latent import Geometry, LatentConfig

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class LatentInit:
    X_G: np.ndarray
    X_R: np.ndarray
    X: np.ndarray
    # row offsets of each sequence inside X
    bounds: List[int]


def _values(sequence) -> np.ndarray:
    return sequence.values if isinstance(sequence, Sequence) else np.asarray(sequence, dtype=float)


def progression(sequence, epsilon: Optional[float] = None) -> np.ndarray:
    """
    Velocity-weighted progression vector of one sequence.

    Increment i (between frames i and i+1) is proportional to
    1 / (v_i + epsilon) with v_i = |y_{i+1} - y_i|; increments are
    normalized to sum to 2*pi.

    Args:
        sequence: Sequence or n x D array, n >= 2
        epsilon: velocity guard, default 1e-3 times the mean velocity

    Returns:
        np.ndarray: theta with theta[0] = 0 and theta[-1] = 2*pi

    Raises:
        TooShortError: If the sequence has fewer than 2 frames
    """
    Y = _values(sequence)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.shape[0] < 2:
        raise TooShortError(f"La progresión necesita al menos 2 pasos, hay {Y.shape[0]}")
    velocity = np.linalg.norm(np.diff(Y, axis=0), axis=1)
    if epsilon is None:
        mean_v = float(np.mean(velocity))
        epsilon = 1e-3 * mean_v if mean_v > 0 else 1.0
    weights = 1.0 / (velocity + epsilon)
    steps = TWO_PI * weights / np.sum(weights)
    theta = np.concatenate([[0.0], np.cumsum(steps)])
    theta[-1] = TWO_PI
    return theta


def fourier_multipliers(m: int) -> np.ndarray:
    """Frequency multipliers k of the cos(k*pi*theta), sin(k*pi*theta) pairs: 2, 3, ..., m+1"""
    return np.arange(2, m + 2, dtype=float)


def fourier_features(theta, m: int, include_constant: bool = True) -> np.ndarray:
    """
    Fourier basis features of a progression vector.

    Columns are [1, cos(2*pi*theta), sin(2*pi*theta), ...] with one cos/sin
    pair per multiplier from fourier_multipliers(m).

    Raises:
        UsageError: If m < 1
    """
    if m < 1:
        raise UsageError(f"El orden de Fourier debe ser >= 1, recibido {m}")
    theta = np.asarray(theta, dtype=float).ravel()
    columns = [np.ones_like(theta)] if include_constant else []
    for k in fourier_multipliers(m):
        columns.append(np.cos(k * np.pi * theta))
        columns.append(np.sin(k * np.pi * theta))
    return np.column_stack(columns)


def _fix_signs(components: np.ndarray) -> np.ndarray:
    # largest-magnitude loading of every component is positive
    idx = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(components.shape[0]), idx])
    signs[signs == 0] = 1.0
    return signs


def pca_features(Y, r: int, return_model: bool = False):
    """
    Mean-centered principal-component scores on the top r components.

    Raises:
        ShapeError: If r exceeds min(N, D)
    """
    Y = np.asarray(Y, dtype=float)
    N, D = Y.shape
    if r < 1 or r > min(N, D):
        raise ShapeError(f"r={r} fuera de rango: debe estar entre 1 y min(N, D)={min(N, D)}")
    pca = PCA(n_components=r, svd_solver="full")
    scores = pca.fit_transform(Y)
    signs = _fix_signs(pca.components_)
    scores = scores * signs
    if return_model:
        return scores, pca.components_ * signs[:, None], pca.mean_
    return scores


def build_latent_init(dataset, config: LatentConfig) -> LatentInit:
    """
    Stack per-sequence Fourier blocks and shared PCA scores into X.

    X_R is computed on the full stacked observation matrix and rescaled so
    its first column has unit standard deviation, keeping it commensurate
    with the bounded Fourier columns. When the data rank is below
    reduction_dims, X_R keeps the requested width with zero columns and a
    warning is logged.

    Raises:
        ShapeError: If sequences have different lengths
    """
    sequences = dataset.sequences if isinstance(dataset, Dataset) else list(dataset)
    lengths = {_values(s).shape[0] for s in sequences}
    if len(lengths) != 1:
        raise ShapeError(f"Las secuencias deben tener igual longitud, encontradas {sorted(lengths)}")
    Y = np.vstack([_values(s) for s in sequences])
    bounds = list(np.cumsum([0] + [_values(s).shape[0] for s in sequences]))

    if config.geometry == Geometry.FOURIER:
        blocks = [fourier_features(progression(s, config.epsilon), config.fourier_order,
                                   config.include_constant) for s in sequences]
        X_G = np.vstack(blocks)
    else:
        X_G = np.zeros((Y.shape[0], 0))

    r = min(config.reduction_dims, *Y.shape)
    X_R = pca_features(Y, r)
    spread = float(np.std(X_R[:, 0]))
    if spread > 0:
        X_R = X_R / spread
    if r < config.reduction_dims:
        logger.warning(f"⚠️  reduction_dims={config.reduction_dims} supera el rango de los datos ({r}); "
                       f"X_R se completa con {config.reduction_dims - r} columnas de ceros")
        X_R = np.hstack([X_R, np.zeros((Y.shape[0], config.reduction_dims - r))])

    X = np.hstack([X_G, X_R])
    logger.debug(f"Latentes iniciales: N={X.shape[0]}, Q={X.shape[1]}")
    return LatentInit(X_G=X_G, X_R=X_R, X=X, bounds=[int(b) for b in bounds])
