"""
Generation-quality measures: windowed displacement (dampening) and
log dimensionless jerk.
"""
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from gpdmm.exceptions import DegenerateTrajectoryError, ShapeError, TooShortError, WindowError


def _trajectory(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if s.ndim == 1:
        s = s[:, None]
    if s.ndim != 2:
        raise ShapeError(f"Se esperaba una trayectoria tiempo x rasgos, forma {s.shape}")
    return s


def default_window(length: int) -> int:
    """10% of the sequence length, at least 2"""
    return max(2, int(0.1 * length))


def mean_displacement(s, w: int) -> float:
    """(1 / (N - w)) * sum_i ||p_{i+w} - p_i||"""
    P = _trajectory(s)
    if w < 1 or w >= P.shape[0]:
        raise WindowError(f"Ventana w={w} inválida para una trayectoria de {P.shape[0]} pasos")
    return float(np.mean(np.linalg.norm(P[w:] - P[:-w], axis=1)))


def dampening(truth, generated, w: Optional[int] = None) -> float:
    """
    Ratio of the truth's to the generated trajectory's windowed mean displacement.

    Values above 1 mean the generated motion has diminished amplitude. A
    generated trajectory that never moves yields ``inf``.

    Raises:
        WindowError: If w does not fit in either trajectory
    """
    truth = _trajectory(truth)
    generated = _trajectory(generated)
    if w is None:
        w = default_window(min(truth.shape[0], generated.shape[0]))
    d_truth = mean_displacement(truth, w)
    d_generated = mean_displacement(generated, w)
    if d_generated == 0.0:
        return float("inf")
    return d_truth / d_generated


def ldj(trajectory, dt: float) -> float:
    """
    Log dimensionless jerk of a trajectory.

    eta = -ln( (duration^3 / v_peak^2) * integral ||d^3x/dt^3||^2 dt ), with
    derivatives by second-order finite differences (central inside, one-sided
    at the ends), the trapezoid rule for the integral and v_peak the largest
    speed. All features are treated jointly.

    Raises:
        TooShortError: If the trajectory has fewer than 4 samples
        DegenerateTrajectoryError: If the trajectory never moves
    """
    X = _trajectory(trajectory)
    n = X.shape[0]
    if n < 4:
        raise TooShortError(f"LDJ necesita al menos 4 muestras, hay {n}")
    if dt <= 0:
        raise ShapeError(f"dt debe ser positivo, recibido {dt}")
    velocity = np.gradient(X, dt, axis=0, edge_order=2)
    acceleration = np.gradient(velocity, dt, axis=0, edge_order=2)
    jerk = np.gradient(acceleration, dt, axis=0, edge_order=2)
    v_peak = float(np.max(np.linalg.norm(velocity, axis=1)))
    if v_peak == 0.0:
        raise DegenerateTrajectoryError("Velocidad pico nula: la trayectoria no se mueve")
    duration = (n - 1) * dt
    integral = trapezoid(np.sum(jerk ** 2, axis=1), dx=dt)
    if integral <= 0.0:
        # jerk-free path
        return float("inf")
    return float(-np.log(duration ** 3 / v_peak ** 2 * integral))


def ldj_ratio(truth, generated, dt: float) -> float:
    """
    Smoothness ratio oriented so that values above 1 mean the generated
    trajectory is less smooth than the truth.

    With both values negative (the usual case) this is eta_generated / eta_truth.
    Otherwise the ratio is exp(eta_truth - eta_generated), which keeps the
    same orientation and equals 1 when both coincide.
    """
    eta_truth = ldj(truth, dt)
    eta_generated = ldj(generated, dt)
    if eta_truth == eta_generated:
        return 1.0
    if eta_truth < 0 and eta_generated < 0:
        return eta_generated / eta_truth
    return float(np.exp(np.clip(eta_truth - eta_generated, -700.0, 700.0)))
