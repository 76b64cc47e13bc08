"""
Per-class dynamical GP: autoregressive latent transitions, sequence scoring,
mean rollout and the FITC sparse variant.
"""
import logging
from dataclasses import dataclass, replace
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from gpdmm.core.kernels import input_gradient, kernel_eval, param_gradient
from gpdmm.core.linalg import GramMatrix, factorize, log_det_psd, psd_inverse, psd_solve
from gpdmm.exceptions import InsufficientPrefixError, ShapeError, UsageError
from gpdmm.gp.fitc import FITCPosterior, FITCState, fitc_posterior, fitc_predict, fitc_terms, stride_inducing
from gpdmm.gp.optim import ObjectiveTrace, log_bounds, maximize
from gpdmm.models.kernel import KernelSum

logger = logging.getLogger(__name__)

LOG_2PI = np.log(2.0 * np.pi)


def transition_indices(bounds: Sequence[int], order: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Row indices of transitions inside a stacked latent matrix.

    Args:
        bounds: row offsets of consecutive sequences, [0, n_1, n_1 + n_2, ...]
        order: Markov order p

    Returns:
        tuple: (inputs, outputs) where inputs[k] lists the p previous rows,
        most recent first, and outputs[k] is the row they predict
    """
    inputs, outputs = [], []
    for start, stop in zip(bounds[:-1], bounds[1:]):
        for t in range(start + order, stop):
            inputs.append([t - lag for lag in range(1, order + 1)])
            outputs.append(t)
    return np.array(inputs, dtype=int).reshape(-1, order), np.array(outputs, dtype=int)


def transitions(X: np.ndarray, order: int, bounds: Optional[Sequence[int]] = None):
    """Autoregressive (X_in, X_out) pairs of one or more stacked latent sequences"""
    X = np.asarray(X, dtype=float)
    bounds = [0, X.shape[0]] if bounds is None else bounds
    idx_in, idx_out = transition_indices(bounds, order)
    X_in = X[idx_in].reshape(len(idx_out), order * X.shape[1])
    return X_in, X[idx_out]


@dataclass(frozen=True)
class DynamicsModel:
    """One expert: a GP from the last `order` latent states to the next one"""

    class_id: int
    order: int
    X_in: np.ndarray
    X_out: np.ndarray
    kernel: KernelSum
    gram: GramMatrix
    alpha: np.ndarray
    sparse: Optional[FITCState] = None

    @property
    def Q(self) -> int:
        return self.X_out.shape[1]

    @property
    def n(self) -> int:
        return self.X_out.shape[0]

    @cached_property
    def fitc(self) -> Optional[FITCPosterior]:
        if self.sparse is None:
            return None
        return fitc_posterior(self.kernel, self.sparse.inducing, self.X_in, self.X_out)

    def predict(self, X_star_in, full_cov: bool = True):
        """
        Predictive distribution of the next latent state.

        Returns:
            tuple: (mean T x Q, covariance T x T including noise, or its diagonal)
        """
        X_star_in = np.atleast_2d(np.asarray(X_star_in, dtype=float))
        if self.fitc is not None:
            return fitc_predict(self.fitc, X_star_in, full_cov=full_cov)
        Ks = kernel_eval(self.kernel, X_star_in, self.X_in)
        mean = Ks @ self.alpha
        v = psd_solve(self.gram, Ks.T)
        if full_cov:
            return mean, kernel_eval(self.kernel, X_star_in) - Ks @ v
        prior = np.diag(kernel_eval(self.kernel, X_star_in))
        return mean, np.maximum(prior - np.sum(Ks * v.T, axis=1), 0.0)

    def predict_mean(self, X_star_in) -> np.ndarray:
        X_star_in = np.atleast_2d(np.asarray(X_star_in, dtype=float))
        if self.fitc is not None:
            return fitc_predict(self.fitc, X_star_in, full_cov=False)[0]
        return kernel_eval(self.kernel, X_star_in, self.X_in) @ self.alpha


def build_dynamics(class_id: int, order: int, X_in, X_out, kernel: KernelSum,
                   sparse: Optional[FITCState] = None) -> DynamicsModel:
    X_in = np.asarray(X_in, dtype=float)
    X_out = np.asarray(X_out, dtype=float)
    if X_in.shape[0] != X_out.shape[0]:
        raise ShapeError(f"X_in tiene {X_in.shape[0]} filas y X_out {X_out.shape[0]}")
    if X_in.shape[1] != order * X_out.shape[1]:
        raise ShapeError(f"X_in debe tener {order} x {X_out.shape[1]} columnas, tiene {X_in.shape[1]}")
    gram = factorize(kernel_eval(kernel, X_in))
    return DynamicsModel(class_id=class_id, order=order, X_in=X_in, X_out=X_out, kernel=kernel,
                         gram=gram, alpha=psd_solve(gram, X_out), sparse=sparse)


def dynamics_terms(kernel: KernelSum, X_in, X_out, with_grad: bool = True):
    """
    GP-regression log-likelihood of X_out given X_in and its gradients.

    Returns:
        tuple: (value, dL/dX_in, dL/dX_out, dL/dtheta), gradients None when
        not requested
    """
    n, q = X_out.shape
    gram = factorize(kernel_eval(kernel, X_in))
    alpha = psd_solve(gram, X_out)
    value = -0.5 * q * log_det_psd(gram) - 0.5 * np.sum(X_out * alpha) - 0.5 * n * q * LOG_2PI
    if not with_grad:
        return value, None, None, None
    G = 0.5 * (alpha @ alpha.T - q * psd_inverse(gram))
    dX_in = input_gradient(kernel, X_in, X_in, G + G.T)
    return value, dX_in, -alpha, param_gradient(kernel, X_in, G)


def dynamics_log_likelihood(model, X_in, X_out) -> float:
    """
    Marginal log-likelihood of the transitions (X_in -> X_out).

    Args:
        model: DynamicsModel or KernelSum whose kernel is used
    """
    kernel = model.kernel if isinstance(model, DynamicsModel) else model
    X_in = np.atleast_2d(np.asarray(X_in, dtype=float))
    X_out = np.atleast_2d(np.asarray(X_out, dtype=float))
    if X_in.shape[0] != X_out.shape[0]:
        raise ShapeError(f"X_in tiene {X_in.shape[0]} filas y X_out {X_out.shape[0]}")
    return float(dynamics_terms(kernel, X_in, X_out, with_grad=False)[0])


def sequence_score(model: DynamicsModel, X_star) -> float:
    """
    Log-density of a latent prefix under one expert.

    The prefix transitions are scored jointly, conditioned on the expert's
    training transitions: Z = X*_out - E[X*_out | X_in, X_out, X*_in] and
    K* is the conditional covariance, giving
    -1/2 tr(K*^-1 Z Z^T) - (Q/2) log|K*| - (T'Q/2) log(2 pi).

    Raises:
        InsufficientPrefixError: If the prefix has no more rows than the order
    """
    X_star = np.atleast_2d(np.asarray(X_star, dtype=float))
    if X_star.shape[0] <= model.order:
        raise InsufficientPrefixError(
            f"El prefijo tiene {X_star.shape[0]} pasos; se necesitan más de {model.order}"
        )
    if X_star.shape[1] != model.Q:
        raise ShapeError(f"El prefijo latente tiene {X_star.shape[1]} columnas, el experto espera {model.Q}")
    Xs_in, Xs_out = transitions(X_star, model.order)
    mean, cov = model.predict(Xs_in, full_cov=True)
    Z = Xs_out - mean
    gram = factorize(cov)
    t, q = Z.shape
    return float(-0.5 * np.sum(Z * psd_solve(gram, Z)) - 0.5 * q * log_det_psd(gram) - 0.5 * t * q * LOG_2PI)


def rollout(model: DynamicsModel, x_seed, steps: int) -> np.ndarray:
    """
    Deterministic mean rollout from the last `order` latent states.

    Args:
        model: trained expert
        x_seed: order x Q latent rows in chronological order
        steps: number of states to generate

    Returns:
        np.ndarray: steps x Q generated latent rows
    """
    x_seed = np.atleast_2d(np.asarray(x_seed, dtype=float))
    if steps <= 0:
        return np.zeros((0, model.Q))
    if x_seed.shape[0] < model.order:
        raise InsufficientPrefixError(f"La semilla necesita {model.order} filas, tiene {x_seed.shape[0]}")
    history: List[np.ndarray] = [row for row in x_seed[-model.order:]]
    out = np.zeros((steps, model.Q))
    for t in range(steps):
        x_in = np.concatenate(history[::-1][:model.order])[None, :]
        out[t] = model.predict_mean(x_in)[0]
        history = history[1:] + [out[t]]
    return out


def fit_dynamics_hyperparameters(model: DynamicsModel, max_iter: int, tolerance: float = 1e-7,
                                 trace: Optional[ObjectiveTrace] = None, round_index: int = 0) -> DynamicsModel:
    """Optimize the expert's kernel hyperparameters with its latents held fixed"""
    kernel = model.kernel

    def fun(log_theta):
        k = kernel.from_log_params(log_theta)
        value, _, _, dtheta = dynamics_terms(k, model.X_in, model.X_out)
        return value, dtheta * k.get_params()

    x0 = np.clip(kernel.log_params(), *log_bounds(1)[0])
    outcome = maximize(fun, x0, max_iter=max_iter, tolerance=tolerance,
                       bounds=log_bounds(x0.size), trace=trace, round_index=round_index,
                       phase=f"dinámica[{model.class_id}]")
    return build_dynamics(model.class_id, model.order, model.X_in, model.X_out,
                          kernel.from_log_params(outcome.x), sparse=model.sparse)


def fitc_fit(model: DynamicsModel, M: int, optimize_inducing: bool = True,
             max_iter: int = 100, tolerance: float = 1e-7) -> DynamicsModel:
    """
    Sparsify an expert with M inducing points.

    Inducing inputs start as a uniform stride subsample of X_in and are
    optimized jointly with the hyperparameters under the FITC marginal
    likelihood unless ``optimize_inducing`` is False.

    Raises:
        UsageError: If M < 1 or M exceeds the number of transitions
    """
    if M < 1:
        raise UsageError(f"El número de puntos inductores debe ser >= 1, recibido {M}")
    if M > model.n:
        raise UsageError(f"M={M} supera las {model.n} transiciones del experto {model.class_id}")
    Z0 = stride_inducing(model.X_in, M)
    kernel = model.kernel
    n_theta = len(kernel.param_names())

    def unpack(params):
        k = kernel.from_log_params(params[:n_theta])
        Z = params[n_theta:].reshape(Z0.shape) if optimize_inducing else Z0
        return k, Z

    def fun(params):
        k, Z = unpack(params)
        value, dZ, dtheta = fitc_terms(k, Z, model.X_in, model.X_out)
        grad = dtheta * k.get_params()
        if optimize_inducing:
            grad = np.concatenate([grad, dZ.ravel()])
        return value, grad

    x0 = np.clip(kernel.log_params(), *log_bounds(1)[0])
    bounds = log_bounds(n_theta)
    if optimize_inducing:
        x0 = np.concatenate([x0, Z0.ravel()])
        bounds = bounds + [(None, None)] * Z0.size
    if max_iter > 0:
        outcome = maximize(fun, x0, max_iter=max_iter, tolerance=tolerance, bounds=bounds,
                           phase=f"fitc[{model.class_id}]")
        x0 = outcome.x
    k, Z = unpack(x0)
    logger.debug(f"Experto {model.class_id}: FITC con M={M} de {model.n} transiciones")
    fitted = build_dynamics(model.class_id, model.order, model.X_in, model.X_out, k)
    return replace(fitted, sparse=FITCState(inducing=np.array(Z, dtype=float)))
