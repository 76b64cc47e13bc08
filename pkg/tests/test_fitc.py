"""
Tests for the FITC sparse experts
"""
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gpdmm.exceptions import UsageError
from gpdmm.gp.dynamics import build_dynamics, dynamics_terms, fitc_fit, sequence_score, transitions
from gpdmm.gp.fitc import FITCState, fitc_terms, stride_inducing
from gpdmm.models.kernel import dynamics_kernel

from conftest import numeric_gradient


@pytest.fixture
def expert(rng):
    t = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    X = np.column_stack([np.cos(t), np.sin(t)]) * 1.5 + 0.01 * rng.normal(size=(16, 2))
    X_in, X_out = transitions(X, 1)
    return build_dynamics(0, 1, X_in, X_out, dynamics_kernel(noise=0.05))


def test_full_inducing_set_reproduces_the_full_gp(expert):
    sparse = replace(expert, sparse=FITCState(inducing=expert.X_in.copy()))
    full_mean, full_var = expert.predict(expert.X_in, full_cov=False)
    fitc_mean, fitc_var = sparse.predict(expert.X_in, full_cov=False)
    assert_allclose(fitc_mean, full_mean, atol=1e-6)
    assert_allclose(fitc_var, full_var, atol=1e-6)
    value = fitc_terms(expert.kernel, expert.X_in, expert.X_in, expert.X_out, with_grad=False)[0]
    assert value == pytest.approx(dynamics_terms(expert.kernel, expert.X_in, expert.X_out, with_grad=False)[0],
                                  rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_fitc_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X_in, X_out = rng.normal(size=(10, 2)), rng.normal(size=(10, 2))
    Z = rng.normal(size=(4, 2))
    k = dynamics_kernel(variance=rng.uniform(0.5, 2), lengthscale=rng.uniform(0.8, 2),
                        linear_variance=rng.uniform(0.05, 0.5), noise=rng.uniform(0.05, 0.2))
    _, dZ, dtheta = fitc_terms(k, Z, X_in, X_out)

    def value(k_, z):
        return fitc_terms(k_, z, X_in, X_out, with_grad=False)[0]

    assert_allclose(dZ, numeric_gradient(lambda z: value(k, z), Z), rtol=1e-4, atol=1e-5)
    assert_allclose(dtheta, numeric_gradient(lambda t: value(k.with_params(t), Z), k.get_params()),
                    rtol=1e-4, atol=1e-5)


def test_stride_subsample_keeps_endpoints(expert):
    Z = stride_inducing(expert.X_in, 4)
    assert Z.shape == (4, 2)
    assert_allclose(Z[0], expert.X_in[0])
    assert_allclose(Z[-1], expert.X_in[-1])


def test_fitc_fit_sparsifies(expert):
    sparse = fitc_fit(expert, 5, max_iter=10)
    assert sparse.sparse.M == 5
    mean, cov = sparse.predict(expert.X_in[:3])
    assert mean.shape == (3, 2) and cov.shape == (3, 3)
    assert np.isfinite(sequence_score(sparse, expert.X_out[:6]))


def test_fitc_fit_can_pin_inducing_points(expert):
    sparse = fitc_fit(expert, 4, optimize_inducing=False, max_iter=5)
    assert_allclose(sparse.sparse.inducing, stride_inducing(expert.X_in, 4))


@pytest.mark.parametrize("M", [0, 100])
def test_inducing_count_is_validated(expert, M):
    with pytest.raises(UsageError):
        fitc_fit(expert, M)
