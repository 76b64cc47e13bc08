"""
Fully independent training conditional (FITC) for the dynamical GPs.

All factorizations go through the whitened form V = L_uu^-1 K_un and
B = I + V Lambda^-1 V^T, so that M = N with inducing points on the
training inputs reproduces the full GP.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from gpdmm.core.kernels import (
    diag_param_gradient,
    input_gradient,
    kernel_diag,
    kernel_eval,
    param_gradient,
)
from gpdmm.core.linalg import factorize
from gpdmm.models.kernel import KernelSum

logger = logging.getLogger(__name__)

LOG_2PI = np.log(2.0 * np.pi)
LAMBDA_FLOOR = 1e-10


@dataclass(frozen=True)
class FITCState:
    """Inducing inputs of a sparse expert"""

    inducing: np.ndarray

    @property
    def M(self) -> int:
        return self.inducing.shape[0]


@dataclass(frozen=True)
class FITCPosterior:
    base: KernelSum
    noise: float
    Z: np.ndarray
    L_uu: np.ndarray
    L_B: np.ndarray
    c: np.ndarray


def _factors(kernel: KernelSum, Z, X_in):
    base = kernel.without_noise()
    noise = kernel.noise
    L_uu = factorize(kernel_eval(base, Z)).lower
    K_un = kernel_eval(base, Z, X_in)
    V = solve_triangular(L_uu, K_un, lower=True, check_finite=False)
    lam = np.maximum(kernel_diag(base, X_in, include_noise=False) - np.sum(V * V, axis=0), 0.0) + noise
    lam = np.maximum(lam, LAMBDA_FLOOR)
    B = np.eye(Z.shape[0]) + (V / lam) @ V.T
    L_B = factorize(B).lower
    return base, noise, L_uu, K_un, V, lam, L_B


def fitc_terms(kernel: KernelSum, Z, X_in, X_out, with_grad: bool = True):
    """
    FITC marginal log-likelihood of X_out given X_in and inducing inputs Z.

    Returns:
        tuple: (value, dL/dZ, dL/dtheta) in the full kernel's param_names()
        order; gradients are None when not requested
    """
    n, q_out = X_out.shape
    base, noise, L_uu, K_un, V, lam, L_B = _factors(kernel, Z, X_in)

    # C^-1 = Lambda^-1 - Lambda^-1 V^T B^-1 V Lambda^-1
    VL = V / lam
    W = solve_triangular(L_B, VL, lower=True, check_finite=False)
    C_inv = np.diag(1.0 / lam) - W.T @ W
    CiY = C_inv @ X_out
    log_det = 2.0 * np.sum(np.log(np.diag(L_B))) + np.sum(np.log(lam))
    value = -0.5 * np.sum(X_out * CiY) - 0.5 * q_out * log_det - 0.5 * n * q_out * LOG_2PI
    if not with_grad:
        return float(value), None, None

    G = 0.5 * (CiY @ CiY.T - q_out * C_inv)
    g = np.diag(G).copy()
    G_off = G - np.diag(g)
    P = solve_triangular(L_uu.T, V, lower=False, check_finite=False)  # K_uu^-1 K_un
    dK_un = 2.0 * P @ G_off
    dK_uu = -P @ G_off @ P.T

    dZ = input_gradient(base, Z, Z, dK_uu + dK_uu.T) + input_gradient(base, Z, X_in, dK_un)
    base_grad = (param_gradient(base, Z, dK_uu) + param_gradient(base, Z, dK_un, B=X_in)
                 + diag_param_gradient(base, X_in, g, include_noise=False))
    by_name = dict(zip(base.param_names(), base_grad))
    by_name["white.noise"] = float(np.sum(g))
    dtheta = np.array([by_name.get(name, 0.0) for name in kernel.param_names()])
    return float(value), dZ, dtheta


def fitc_posterior(kernel: KernelSum, Z, X_in, X_out) -> FITCPosterior:
    base, noise, L_uu, _, V, lam, L_B = _factors(kernel, Z, X_in)
    c = solve_triangular(L_B, (V / lam) @ X_out, lower=True, check_finite=False)
    return FITCPosterior(base=base, noise=noise, Z=Z, L_uu=L_uu, L_B=L_B, c=c)


def fitc_predict(post: FITCPosterior, X_star, full_cov: bool = True, include_noise: bool = True):
    """
    FITC predictive mean and covariance at new inputs.

    Returns:
        tuple: (mean T x Q, covariance T x T or variance T)
    """
    K_us = kernel_eval(post.base, post.Z, X_star)
    w = solve_triangular(post.L_uu, K_us, lower=True, check_finite=False)
    tmp = solve_triangular(post.L_B, w, lower=True, check_finite=False)
    mean = tmp.T @ post.c
    noise = post.noise if include_noise else 0.0
    if full_cov:
        cov = kernel_eval(post.base, X_star) - w.T @ w + tmp.T @ tmp + noise * np.eye(X_star.shape[0])
        return mean, cov
    var = kernel_diag(post.base, X_star, include_noise=False) - np.sum(w * w, axis=0) + np.sum(tmp * tmp, axis=0)
    return mean, np.maximum(var, 0.0) + noise


def stride_inducing(X_in: np.ndarray, M: int) -> np.ndarray:
    """Uniform stride subsample of the training inputs"""
    idx = np.round(np.linspace(0, X_in.shape[0] - 1, M)).astype(int)
    return X_in[idx].copy()
