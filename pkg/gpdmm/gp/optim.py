"""
Thin wrapper over scipy's L-BFGS-B that maximizes an objective and records
every accepted step.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from gpdmm.exceptions import NumericError, SingularMatrixError

logger = logging.getLogger(__name__)

# bounds on log-hyperparameters
LOG_PARAM_BOUNDS = (np.log(1e-6), np.log(1e6))


@dataclass
class ObjectiveTrace:
    """Accepted objective values, one entry per optimizer iteration"""

    entries: List[dict] = field(default_factory=list)

    def record(self, phase: str, round_index: int, iteration: int, objective: float) -> None:
        self.entries.append({
            "phase": phase,
            "round": round_index,
            "iteration": iteration,
            "objective": float(objective),
        })


@dataclass(frozen=True)
class OptimizeOutcome:
    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    message: str


def maximize(fun: Callable[[np.ndarray], Tuple[float, np.ndarray]], x0: np.ndarray,
             max_iter: int, tolerance: float = 1e-7,
             bounds: Optional[Sequence[Tuple[Optional[float], Optional[float]]]] = None,
             trace: Optional[ObjectiveTrace] = None, phase: str = "", round_index: int = 0) -> OptimizeOutcome:
    """
    Maximize fun(x) -> (value, gradient) with L-BFGS-B.

    The best iterate is returned even when the budget runs out; the
    ``converged`` flag tells the caller which case happened.

    Raises:
        NumericError: If the objective becomes non-finite, with the iteration index
    """
    x0 = np.asarray(x0, dtype=float)
    state = {"iteration": 0}

    def negated(x):
        try:
            value, grad = fun(x)
        except SingularMatrixError as e:
            raise NumericError(f"{phase}: {e}", iteration=state["iteration"]) from e
        if not np.isfinite(value) or not np.all(np.isfinite(grad)):
            raise NumericError(f"{phase}: objetivo no finito en la iteración {state['iteration']}",
                               iteration=state["iteration"])
        return -value, -np.asarray(grad, dtype=float)

    def callback(intermediate_result):
        state["iteration"] += 1
        if trace is not None:
            trace.record(phase, round_index, state["iteration"], -intermediate_result.fun)

    if x0.size == 0:
        value, _ = fun(x0)
        return OptimizeOutcome(x=x0, value=float(value), iterations=0, converged=True, message="sin parámetros")

    result = minimize(negated, x0, jac=True, method="L-BFGS-B", bounds=bounds, callback=callback,
                      options={"maxiter": int(max_iter), "ftol": tolerance, "gtol": 1e-10})
    if not result.success:
        logger.debug(f"{phase}: L-BFGS-B terminó sin convergencia ({result.message})")
    return OptimizeOutcome(x=result.x, value=float(-result.fun), iterations=int(result.nit),
                           converged=bool(result.success), message=str(result.message))


def log_bounds(count: int) -> List[Tuple[float, float]]:
    return [LOG_PARAM_BOUNDS] * count


def write_trace(trace: ObjectiveTrace, path) -> None:
    """One JSON object per accepted step, keys sorted"""
    lines = [json.dumps(entry, sort_keys=True) for entry in trace.entries]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + ("\n" if lines else ""))
