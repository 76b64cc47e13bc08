"""
Shared emission GP: latent coordinates X -> observations Y.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from gpdmm.core.kernels import (
    diag_input_gradient,
    input_gradient,
    kernel_diag,
    kernel_eval,
    param_gradient,
)
from gpdmm.core.linalg import GramMatrix, factorize, log_det_psd, psd_inverse, psd_solve
from gpdmm.exceptions import ShapeError
from gpdmm.gp.optim import maximize
from gpdmm.models.kernel import KernelSum

logger = logging.getLogger(__name__)

LOG_2PI = np.log(2.0 * np.pi)
VARIANCE_FLOOR = 1e-12


class ProjectionInit(str, Enum):
    NEAREST_NEIGHBOR = "nearest_neighbor"
    PROVIDED = "provided"


@dataclass(frozen=True)
class EmissionModel:
    """Trained emission GP; immutable once built"""

    X: np.ndarray
    Y_mean: np.ndarray
    Y_centered: np.ndarray
    kernel: KernelSum
    gram: GramMatrix
    alpha_cache: np.ndarray

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def Q(self) -> int:
        return self.X.shape[1]

    @property
    def D(self) -> int:
        return self.Y_centered.shape[1]

    @property
    def Y(self) -> np.ndarray:
        return self.Y_centered + self.Y_mean


@dataclass(frozen=True)
class EmissionGradients:
    X: np.ndarray
    # raw-hyperparameter gradients in kernel.param_names() order
    params: np.ndarray


@dataclass(frozen=True)
class LatentProjection:
    X: np.ndarray
    converged: bool
    objective_init: float
    objective: float


def _check(X, Y) -> Tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] != Y.shape[0]:
        raise ShapeError(f"X tiene {X.shape[0]} filas e Y {Y.shape[0]}")
    return X, Y


def build_emission(X, Y, kernel: KernelSum) -> EmissionModel:
    """Center Y, factorize the Gram matrix and cache K^-1 Y"""
    X, Y = _check(X, Y)
    Y_mean = Y.mean(axis=0)
    Yc = Y - Y_mean
    gram = factorize(kernel_eval(kernel, X))
    return EmissionModel(X=X, Y_mean=Y_mean, Y_centered=Yc, kernel=kernel, gram=gram,
                         alpha_cache=psd_solve(gram, Yc))


def emission_terms(X, Yc, kernel: KernelSum, with_grad: bool = True):
    """
    Log-likelihood of centered Y and, optionally, its gradients.

    Returns:
        tuple: (value, dL/dX, dL/dtheta) with gradients None when not requested
    """
    N, D = Yc.shape
    gram = factorize(kernel_eval(kernel, X))
    alpha = psd_solve(gram, Yc)
    value = -0.5 * D * log_det_psd(gram) - 0.5 * np.sum(Yc * alpha) - 0.5 * N * D * LOG_2PI
    if not with_grad:
        return value, None, None
    G = 0.5 * (alpha @ alpha.T - D * psd_inverse(gram))
    dX = input_gradient(kernel, X, X, G + G.T)
    dtheta = param_gradient(kernel, X, G)
    return value, dX, dtheta


def emission_log_likelihood(X, Y, kernel: KernelSum) -> float:
    """
    GPLVM marginal log-likelihood of mean-centered Y:
    -(D/2) log|K| - 1/2 tr(K^-1 Y Y^T) - (ND/2) log(2 pi).
    """
    X, Y = _check(X, Y)
    value, _, _ = emission_terms(X, Y - Y.mean(axis=0), kernel, with_grad=False)
    return float(value)


def emission_gradients(X, Y, kernel: KernelSum) -> EmissionGradients:
    """Analytic gradients of emission_log_likelihood w.r.t. X and the raw hyperparameters"""
    X, Y = _check(X, Y)
    _, dX, dtheta = emission_terms(X, Y - Y.mean(axis=0), kernel)
    return EmissionGradients(X=dX, params=dtheta)


def emission_predict(model: EmissionModel, X_star, include_noise: bool = False):
    """
    GP predictive mean and variance at new latent points.

    Returns:
        tuple: (mean T x D, variance T), variance clamped at 0
    """
    X_star = np.atleast_2d(np.asarray(X_star, dtype=float))
    if X_star.shape[0] == 0:
        return np.zeros((0, model.D)), np.zeros(0)
    Ks = kernel_eval(model.kernel, X_star, model.X)
    mean = Ks @ model.alpha_cache + model.Y_mean
    v = psd_solve(model.gram, Ks.T)
    variance = kernel_diag(model.kernel, X_star, include_noise=include_noise) - np.sum(Ks * v.T, axis=1)
    return mean, np.maximum(variance, 0.0)


def _projection_objective(model: EmissionModel, Y_star: np.ndarray):
    T, D = Y_star.shape
    Q = model.Q

    def fun(flat):
        Xs = flat.reshape(T, Q)
        Ks = kernel_eval(model.kernel, Xs, model.X)
        mean = Ks @ model.alpha_cache + model.Y_mean
        v = psd_solve(model.gram, Ks.T)
        var = np.maximum(kernel_diag(model.kernel, Xs) - np.sum(Ks * v.T, axis=1), VARIANCE_FLOOR)
        resid = Y_star - mean
        r = np.sum(resid ** 2, axis=1)
        value = np.sum(-0.5 * D * np.log(var) - 0.5 * r / var) - 0.5 * T * D * LOG_2PI
        a = -0.5 * D / var + 0.5 * r / var ** 2
        B = resid / var[:, None]
        G = B @ model.alpha_cache.T - 2.0 * a[:, None] * v.T
        grad = input_gradient(model.kernel, Xs, model.X, G) + diag_input_gradient(model.kernel, Xs, a)
        return float(value), grad.ravel()

    return fun


def infer_latent(model: EmissionModel, y_star, init: ProjectionInit = ProjectionInit.NEAREST_NEIGHBOR,
                 x_init: Optional[np.ndarray] = None, max_iter: int = 200) -> LatentProjection:
    """
    Project observations into the latent space with the model held fixed.

    Rows are optimized jointly under the emission predictive density only;
    no dynamics enter the projection. Duplicate observation rows share one
    optimized latent row.

    Args:
        model: trained emission GP
        y_star: T x D observations
        init: nearest_neighbor starts each row at the latent of the closest
            training observation; provided uses x_init
        x_init: T x Q starting latents when init is provided
        max_iter: L-BFGS-B iteration budget

    Returns:
        LatentProjection: latents, convergence flag and objective values

    Raises:
        ShapeError: If y_star does not have D columns
    """
    Y_star = np.asarray(y_star, dtype=float)
    if Y_star.ndim == 1:
        Y_star = Y_star[None, :]
    if Y_star.shape[0] == 0:
        return LatentProjection(X=np.zeros((0, model.Q)), converged=True, objective_init=0.0, objective=0.0)
    if Y_star.shape[1] != model.D:
        raise ShapeError(f"Las observaciones tienen {Y_star.shape[1]} rasgos, el modelo espera {model.D}")

    unique, inverse = np.unique(Y_star, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    if init == ProjectionInit.PROVIDED:
        if x_init is None:
            raise ShapeError("init=provided requiere x_init")
        x_init = np.asarray(x_init, dtype=float)
        first = np.array([np.flatnonzero(inverse == u)[0] for u in range(unique.shape[0])])
        X0 = x_init[first]
    else:
        nearest = np.argmin(cdist(unique, model.Y), axis=1)
        X0 = model.X[nearest]

    fun = _projection_objective(model, unique)
    start_value, _ = fun(X0.ravel())
    outcome = maximize(fun, X0.ravel(), max_iter=max_iter, phase="proyección")
    if outcome.value >= start_value:
        X_u, value = outcome.x.reshape(X0.shape), outcome.value
    else:
        X_u, value = X0, start_value
    if not outcome.converged:
        logger.warning(f"⚠️  Proyección latente sin convergencia tras {outcome.iterations} iteraciones")
    return LatentProjection(X=X_u[inverse], converged=outcome.converged,
                            objective_init=float(start_value), objective=float(value))
