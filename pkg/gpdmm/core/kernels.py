"""
Kernel evaluation and analytic gradients.

All functions accept either a single KernelSpec or a KernelSum. Passing
``B=None`` means "the same point set as A": only then does the white
component contribute its ``noise * I``.
"""
from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np
from scipy.spatial.distance import cdist

from gpdmm.exceptions import NumericError, ShapeError
from gpdmm.models.kernel import KIND_PARAMS, KernelKind, KernelSpec, KernelSum

Kernel = Union[KernelSpec, KernelSum]


@dataclass(frozen=True)
class KernelGradients:
    """Derivatives of a kernel matrix K(A, B)"""

    # name -> dK/dtheta, each n x m
    params: Dict[str, np.ndarray]
    # inputs[i, j, :] = d k(A_i, B_j) / d A_i
    inputs: np.ndarray


def _parts(kernel: Kernel):
    return kernel.parts if isinstance(kernel, KernelSum) else [kernel]


def _prefix(spec: KernelSpec, name: str) -> str:
    return f"{spec.kind.value}.{name}"


def _as_points(A, label: str) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ShapeError(f"{label} debe ser una matriz de puntos, forma recibida {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericError(f"{label} contiene valores no finitos")
    return A


def _inputs(A, B):
    A = _as_points(A, "A")
    same = B is None
    B = A if same else _as_points(B, "B")
    if A.shape[1] != B.shape[1]:
        raise ShapeError(f"Dimensiones incompatibles: A tiene {A.shape[1]} columnas, B tiene {B.shape[1]}")
    return A, B, same


def _rbf(spec: KernelSpec, A, B) -> np.ndarray:
    d2 = cdist(A, B, "sqeuclidean")
    return spec.variance * np.exp(-0.5 * d2 / spec.lengthscale ** 2)


def _dot(A, B) -> np.ndarray:
    # elementwise products summed in a fixed order keep K(A,B) == K(B,A).T exactly
    return (A[:, None, :] * B[None, :, :]).sum(axis=-1)


def _component(spec: KernelSpec, A, B, same: bool) -> np.ndarray:
    kind = spec.kind
    if kind == KernelKind.RBF:
        return _rbf(spec, A, B)
    if kind == KernelKind.LINEAR:
        return spec.linear_variance * _dot(A, B)
    if kind == KernelKind.RBF_PLUS_LINEAR:
        return _rbf(spec, A, B) + spec.linear_variance * _dot(A, B)
    if kind == KernelKind.BIAS:
        return np.full((A.shape[0], B.shape[0]), spec.variance)
    if same:
        return spec.noise * np.eye(A.shape[0])
    return np.zeros((A.shape[0], B.shape[0]))


def kernel_eval(kernel: Kernel, A, B=None) -> np.ndarray:
    """
    Evaluate the kernel matrix between two point sets.

    Args:
        kernel: KernelSpec or KernelSum
        A: n x q points
        B: m x q points, or None for K(A, A) including white noise

    Returns:
        np.ndarray: n x m kernel matrix

    Raises:
        ShapeError: If A and B have different column counts
        NumericError: If any input is not finite
    """
    A, B, same = _inputs(A, B)
    K = np.zeros((A.shape[0], B.shape[0]))
    for spec in _parts(kernel):
        K += _component(spec, A, B, same)
    return K


def kernel_diag(kernel: Kernel, A, include_noise: bool = True) -> np.ndarray:
    """Diagonal of K(A, A) without forming the matrix"""
    A = _as_points(A, "A")
    diag = np.zeros(A.shape[0])
    sq = np.sum(A * A, axis=1)
    for spec in _parts(kernel):
        if spec.kind in (KernelKind.RBF, KernelKind.RBF_PLUS_LINEAR, KernelKind.BIAS):
            diag += spec.variance
        if spec.kind in (KernelKind.LINEAR, KernelKind.RBF_PLUS_LINEAR):
            diag += spec.linear_variance * sq
        if spec.kind == KernelKind.WHITE and include_noise:
            diag += spec.noise
    return diag


def kernel_grad(kernel: Kernel, A, B=None) -> KernelGradients:
    """
    Analytic gradients of K(A, B) w.r.t. every hyperparameter and w.r.t. A.

    Returns:
        KernelGradients: dK/dtheta per ``<kind>.<param>`` name, and the
        n x m x q tensor of first-argument input derivatives
    """
    A, B, same = _inputs(A, B)
    n, m, q = A.shape[0], B.shape[0], A.shape[1]
    params: Dict[str, np.ndarray] = {}
    inputs = np.zeros((n, m, q))
    diff = A[:, None, :] - B[None, :, :]
    for spec in _parts(kernel):
        kind = spec.kind
        if kind in (KernelKind.RBF, KernelKind.RBF_PLUS_LINEAR):
            K = _rbf(spec, A, B)
            d2 = cdist(A, B, "sqeuclidean")
            params[_prefix(spec, "variance")] = K / spec.variance
            params[_prefix(spec, "lengthscale")] = K * d2 / spec.lengthscale ** 3
            inputs -= K[:, :, None] * diff / spec.lengthscale ** 2
        if kind in (KernelKind.LINEAR, KernelKind.RBF_PLUS_LINEAR):
            params[_prefix(spec, "linear_variance")] = _dot(A, B)
            inputs += spec.linear_variance * np.broadcast_to(B[None, :, :], (n, m, q))
        if kind == KernelKind.BIAS:
            params[_prefix(spec, "variance")] = np.ones((n, m))
        if kind == KernelKind.WHITE:
            params[_prefix(spec, "noise")] = np.eye(n) if same else np.zeros((n, m))
    return KernelGradients(params=params, inputs=inputs)


def param_gradient(kernel: Kernel, A, G: np.ndarray, B=None) -> np.ndarray:
    """
    Contract dL/dK with dK/dtheta.

    Returns:
        np.ndarray: sum(G * dK/dtheta) for every hyperparameter, in the
        kernel's param_names() order
    """
    grads = kernel_grad(kernel, A, B).params
    return np.array([np.sum(G * grads[_prefix(spec, name)])
                     for spec in _parts(kernel) for name in KIND_PARAMS[spec.kind]])


def input_gradient(kernel: Kernel, A, B, G: np.ndarray) -> np.ndarray:
    """
    Contract dL/dK with the first-argument input derivatives.

    Computes sum_j G_ij * d k(A_i, B_j) / d A_i without the n x m x q tensor.
    For a symmetric K(X, X) the total derivative is
    ``input_gradient(kernel, X, X, G + G.T)``.
    """
    A, B, _ = _inputs(A, B)
    out = np.zeros_like(A)
    for spec in _parts(kernel):
        kind = spec.kind
        if kind in (KernelKind.RBF, KernelKind.RBF_PLUS_LINEAR):
            W = G * _rbf(spec, A, B)
            out -= (W.sum(axis=1)[:, None] * A - W @ B) / spec.lengthscale ** 2
        if kind in (KernelKind.LINEAR, KernelKind.RBF_PLUS_LINEAR):
            out += spec.linear_variance * (G @ B)
    return out


def diag_input_gradient(kernel: Kernel, A, g: np.ndarray) -> np.ndarray:
    """Derivative of sum_i g_i k(A_i, A_i) w.r.t. A"""
    A = _as_points(A, "A")
    out = np.zeros_like(A)
    for spec in _parts(kernel):
        if spec.kind in (KernelKind.LINEAR, KernelKind.RBF_PLUS_LINEAR):
            out += 2.0 * spec.linear_variance * g[:, None] * A
    return out


def diag_param_gradient(kernel: Kernel, A, g: np.ndarray, include_noise: bool = True) -> np.ndarray:
    """Derivative of sum_i g_i k(A_i, A_i) w.r.t. each hyperparameter"""
    A = _as_points(A, "A")
    sq = np.sum(A * A, axis=1)
    out = []
    for spec in _parts(kernel):
        for name in KIND_PARAMS[spec.kind]:
            if name == "variance":
                out.append(np.sum(g))
            elif name == "linear_variance":
                out.append(np.sum(g * sq))
            elif name == "noise":
                out.append(np.sum(g) if include_noise else 0.0)
            else:
                out.append(0.0)
    return np.array(out)
