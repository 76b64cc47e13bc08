"""
Error hierarchy for the GPDMM package.

Every error carries the exit code the CLI returns when it surfaces.
"""
from typing import Optional


class GPDMMError(Exception):
    """Base class for all package errors"""

    exit_code: int = 1


class UsageError(GPDMMError):
    """Invalid arguments, configuration or call order"""

    exit_code = 1


class InsufficientPrefixError(UsageError):
    """Prefix too short for the Markov order of the model"""


class DataError(GPDMMError):
    """Problems with the data itself: files, shapes, class composition"""

    exit_code = 2


class LoadError(DataError):
    """Manifest or sequence file could not be read or validated"""


class ShapeError(DataError):
    """Array dimensions are inconsistent"""


class TooShortError(DataError):
    """Sequence has fewer time steps than an operation needs"""


class MissingClassError(DataError):
    """A class has no sequences"""


class SplitError(DataError):
    """Not enough sequences in a class for the requested split"""


class DegenerateClassError(DataError):
    """All sequences of a class coincide, so the Fréchet normalizer is zero"""


class DegenerateTrajectoryError(DataError):
    """Trajectory never moves, so smoothness is undefined"""


class WindowError(DataError):
    """Sliding window does not fit inside the trajectory"""


class NumericError(GPDMMError):
    """Non-finite values or failed factorizations"""

    exit_code = 3

    def __init__(self, message: str, iteration: Optional[int] = None):
        super().__init__(message)
        self.iteration = iteration


class SingularMatrixError(NumericError):
    """Cholesky failed even with the largest jitter"""

    def __init__(self, message: str, jitter: float):
        super().__init__(f"{message} (jitter final probado: {jitter:.3e})")
        self.jitter = jitter
