"""
Dense linear algebra and kernel machinery shared by every GP in the model
"""
from .kernels import (
    KernelGradients,
    diag_input_gradient,
    diag_param_gradient,
    input_gradient,
    kernel_diag,
    kernel_eval,
    kernel_grad,
    param_gradient,
)
from .linalg import GramMatrix, factorize, log_det_psd, lower_solve, psd_inverse, psd_solve

__all__ = [
    "KernelGradients", "kernel_eval", "kernel_diag", "kernel_grad", "param_gradient",
    "input_gradient", "diag_input_gradient", "diag_param_gradient",
    "GramMatrix", "factorize", "psd_solve", "log_det_psd", "psd_inverse", "lower_solve",
]
