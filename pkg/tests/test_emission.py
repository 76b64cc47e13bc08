"""
Tests for the shared emission GP
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import multivariate_normal

from gpdmm.core.kernels import kernel_eval
from gpdmm.exceptions import ShapeError
from gpdmm.gp.emission import (
    ProjectionInit,
    build_emission,
    emission_gradients,
    emission_log_likelihood,
    emission_predict,
    infer_latent,
)
from gpdmm.models.kernel import KernelKind, KernelSpec, KernelSum, emission_kernel

from conftest import numeric_gradient


@pytest.fixture
def problem(rng):
    X = rng.normal(size=(12, 2))
    Y = np.column_stack([np.sin(X[:, 0]), np.cos(X[:, 1]), X[:, 0] * X[:, 1]])
    return X, Y, emission_kernel(variance=1.0, lengthscale=1.0, bias=0.1, noise=0.05)


def test_log_likelihood_is_a_gaussian_density(problem):
    X, Y, k = problem
    Yc = Y - Y.mean(axis=0)
    K = kernel_eval(k, X)
    expected = sum(multivariate_normal(mean=np.zeros(len(X)), cov=K).logpdf(Yc[:, d]) for d in range(3))
    assert emission_log_likelihood(X, Y, k) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("seed", range(20))
def test_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(8, 2))
    Y = rng.normal(size=(8, 3))
    k = emission_kernel(variance=rng.uniform(0.5, 2), lengthscale=rng.uniform(0.5, 2),
                        bias=rng.uniform(0.05, 0.5), noise=rng.uniform(0.05, 0.2))
    grads = emission_gradients(X, Y, k)
    assert_allclose(grads.X, numeric_gradient(lambda x: emission_log_likelihood(x, Y, k), X),
                    rtol=1e-4, atol=1e-6)
    assert_allclose(grads.params,
                    numeric_gradient(lambda t: emission_log_likelihood(X, Y, k.with_params(t)), k.get_params()),
                    rtol=1e-4, atol=1e-6)


def test_prediction_interpolates_training_points(problem):
    X, Y, _ = problem
    model = build_emission(X, Y, emission_kernel(noise=1e-6))
    mean, var = emission_predict(model, X)
    assert_allclose(mean, Y, atol=1e-3)
    assert np.all(var >= 0)


def test_prediction_of_empty_input(problem):
    model = build_emission(*problem)
    mean, var = emission_predict(model, np.zeros((0, 2)))
    assert mean.shape == (0, 3) and var.shape == (0,)


def test_projection_recovers_training_latents(problem):
    X, Y, _ = problem
    model = build_emission(X, Y, emission_kernel(noise=1e-4))
    projection = infer_latent(model, Y[:4])
    assert projection.objective >= projection.objective_init
    mean, _ = emission_predict(model, projection.X)
    assert_allclose(mean, Y[:4], atol=0.05)


def test_projection_shares_rows_of_duplicate_observations(problem):
    model = build_emission(*problem)
    Y_star = np.vstack([model.Y[0], model.Y[0], model.Y[3]])
    projection = infer_latent(model, Y_star)
    assert np.array_equal(projection.X[0], projection.X[1])


def test_projection_from_provided_start(problem):
    model = build_emission(*problem)
    projection = infer_latent(model, model.Y[:2], init=ProjectionInit.PROVIDED, x_init=model.X[:2])
    assert projection.X.shape == (2, 2)
    with pytest.raises(ShapeError):
        infer_latent(model, model.Y[:2], init=ProjectionInit.PROVIDED)


def test_projection_rejects_wrong_feature_count(problem):
    model = build_emission(*problem)
    with pytest.raises(ShapeError):
        infer_latent(model, np.zeros((3, 5)))


def test_white_noise_kernel_has_no_latent_gradient(problem):
    X, Y, _ = problem
    white = KernelSum(parts=[KernelSpec(kind=KernelKind.WHITE, noise=0.3)])
    grads = emission_gradients(X, Y, white)
    assert np.array_equal(grads.X, np.zeros_like(X))
