"""
Positive-definite solves with escalating jitter.

Single-example training produces near-singular Gram matrices, so every
factorization retries with jitter 1e-8, 1e-7, ..., 1e-2 times the mean
diagonal before giving up.
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular

from gpdmm.exceptions import NumericError, ShapeError, SingularMatrixError

logger = logging.getLogger(__name__)

JITTER_START = 1e-8
JITTER_STOP = 1e-2


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric positive-definite matrix together with its Cholesky factor"""

    values: np.ndarray
    jitter_applied: float
    lower: np.ndarray

    @property
    def size(self) -> int:
        return self.values.shape[0]


def _jitter_schedule(mean_diag: float):
    scale = mean_diag if mean_diag > 0 else 1.0
    yield 0.0
    level = JITTER_START
    while level <= JITTER_STOP * (1 + 1e-9):
        yield level * scale
        level *= 10.0


def factorize(K) -> GramMatrix:
    """
    Cholesky-factorize a symmetric matrix, adding jitter when needed.

    Args:
        K: square matrix

    Returns:
        GramMatrix: symmetrized values, jitter used and lower factor

    Raises:
        ShapeError: If K is not square
        NumericError: If K contains non-finite entries
        SingularMatrixError: If the largest jitter still fails
    """
    if isinstance(K, GramMatrix):
        return K
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ShapeError(f"Se esperaba una matriz cuadrada, forma recibida {K.shape}")
    if not np.all(np.isfinite(K)):
        raise NumericError("La matriz de Gram contiene valores no finitos")
    K = 0.5 * (K + K.T)
    n = K.shape[0]
    mean_diag = float(np.mean(np.diag(K))) if n else 1.0
    jitter = 0.0
    for jitter in _jitter_schedule(mean_diag):
        try:
            L = cholesky(K + jitter * np.eye(n), lower=True, check_finite=False)
        except LinAlgError:
            continue
        if jitter > 0:
            logger.debug(f"Cholesky requirió jitter {jitter:.3e} (n={n})")
        return GramMatrix(values=K, jitter_applied=jitter, lower=L)
    raise SingularMatrixError("Matriz no definida positiva tras escalar el jitter", jitter)


def psd_solve(K: Union[GramMatrix, np.ndarray], B) -> np.ndarray:
    """
    Solve K X = B for symmetric positive-definite K.

    Raises:
        ShapeError: If the row count of B does not match K
        SingularMatrixError: If K cannot be factorized
    """
    gram = factorize(K)
    B = np.asarray(B, dtype=float)
    if B.shape[0] != gram.size:
        raise ShapeError(f"B tiene {B.shape[0]} filas, K es {gram.size}x{gram.size}")
    return cho_solve((gram.lower, True), B, check_finite=False)


def log_det_psd(K: Union[GramMatrix, np.ndarray]) -> float:
    """log|K| from the Cholesky diagonal"""
    gram = factorize(K)
    return float(2.0 * np.sum(np.log(np.diag(gram.lower))))


def psd_inverse(K: Union[GramMatrix, np.ndarray]) -> np.ndarray:
    gram = factorize(K)
    return psd_solve(gram, np.eye(gram.size))


def lower_solve(K: Union[GramMatrix, np.ndarray], B) -> np.ndarray:
    """L^-1 B for the lower Cholesky factor L of K"""
    gram = factorize(K)
    return solve_triangular(gram.lower, np.asarray(B, dtype=float), lower=True, check_finite=False)
