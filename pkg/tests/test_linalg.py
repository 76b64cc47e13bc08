"""
Tests for jittered Cholesky solves
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from gpdmm.core.linalg import factorize, log_det_psd, lower_solve, psd_inverse, psd_solve
from gpdmm.exceptions import NumericError, ShapeError, SingularMatrixError


@pytest.fixture
def spd(rng):
    A = rng.normal(size=(6, 6))
    return A @ A.T + 6 * np.eye(6)


def test_well_conditioned_matrix_needs_no_jitter(spd):
    assert factorize(spd).jitter_applied == 0.0


def test_solve_and_logdet_match_numpy(spd, rng):
    B = rng.normal(size=(6, 2))
    assert_allclose(psd_solve(spd, B), np.linalg.solve(spd, B), rtol=1e-10)
    assert log_det_psd(spd) == pytest.approx(np.linalg.slogdet(spd)[1], rel=1e-12)
    assert_allclose(psd_inverse(spd) @ spd, np.eye(6), atol=1e-10)


def test_lower_solve_uses_cholesky_factor(spd, rng):
    B = rng.normal(size=(6, 3))
    L = np.linalg.cholesky(spd)
    assert_allclose(lower_solve(spd, B), np.linalg.solve(L, B), rtol=1e-10)


def test_rank_deficient_matrix_gets_jitter():
    gram = factorize(np.ones((4, 4)))
    assert 1e-8 <= gram.jitter_applied <= 1e-2


def test_indefinite_matrix_reports_final_jitter():
    with pytest.raises(SingularMatrixError) as info:
        factorize(-np.eye(3))
    assert info.value.jitter == pytest.approx(1e-2)
    assert info.value.exit_code == 3


def test_non_square_raises():
    with pytest.raises(ShapeError):
        factorize(np.zeros((2, 3)))


def test_non_finite_raises():
    with pytest.raises(NumericError):
        factorize(np.array([[1.0, np.inf], [np.inf, 1.0]]))


def test_solve_shape_mismatch(spd):
    with pytest.raises(ShapeError):
        psd_solve(spd, np.zeros((5, 1)))
