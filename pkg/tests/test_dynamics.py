"""
Tests for the per-class dynamical GP
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.stats import multivariate_normal

from gpdmm.core.kernels import kernel_eval
from gpdmm.exceptions import InsufficientPrefixError, ShapeError
from gpdmm.gp.dynamics import (
    build_dynamics,
    dynamics_log_likelihood,
    dynamics_terms,
    fit_dynamics_hyperparameters,
    rollout,
    sequence_score,
    transition_indices,
    transitions,
)
from gpdmm.gp.optim import ObjectiveTrace
from gpdmm.models.kernel import dynamics_kernel

from conftest import numeric_gradient


def circle(n=20, order=1):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    X = np.column_stack([np.cos(t), np.sin(t)])
    X_in, X_out = transitions(X, order)
    return X, build_dynamics(0, order, X_in, X_out, dynamics_kernel(noise=1e-3))


def test_transition_indices_most_recent_first():
    idx_in, idx_out = transition_indices([0, 4, 7], order=2)
    assert idx_in.tolist() == [[1, 0], [2, 1], [5, 4]]
    assert idx_out.tolist() == [2, 3, 6]


def test_second_order_inputs_concatenate_lags():
    X = np.arange(10, dtype=float).reshape(5, 2)
    X_in, X_out = transitions(X, order=2)
    assert X_in.shape == (3, 4)
    assert_allclose(X_in[0], np.concatenate([X[1], X[0]]))
    assert_allclose(X_out[0], X[2])


def test_log_likelihood_is_a_gaussian_density(rng):
    X_in, X_out = rng.normal(size=(7, 2)), rng.normal(size=(7, 2))
    k = dynamics_kernel(noise=0.1)
    K = kernel_eval(k, X_in)
    expected = sum(multivariate_normal(np.zeros(7), K).logpdf(X_out[:, q]) for q in range(2))
    assert dynamics_log_likelihood(k, X_in, X_out) == pytest.approx(expected, rel=1e-10)


def test_log_likelihood_shape_mismatch(rng):
    with pytest.raises(ShapeError):
        dynamics_log_likelihood(dynamics_kernel(), rng.normal(size=(4, 2)), rng.normal(size=(3, 2)))


@pytest.mark.parametrize("seed", range(20))
def test_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    X_in, X_out = rng.normal(size=(6, 4)), rng.normal(size=(6, 2))
    k = dynamics_kernel(variance=rng.uniform(0.5, 2), lengthscale=rng.uniform(0.8, 2),
                        linear_variance=rng.uniform(0.05, 0.5), noise=rng.uniform(0.05, 0.2))
    _, dX_in, dX_out, dtheta = dynamics_terms(k, X_in, X_out)

    def value(k_, a, b):
        return dynamics_terms(k_, a, b, with_grad=False)[0]

    assert_allclose(dX_in, numeric_gradient(lambda x: value(k, x, X_out), X_in), rtol=1e-4, atol=1e-6)
    assert_allclose(dX_out, numeric_gradient(lambda x: value(k, X_in, x), X_out), rtol=1e-4, atol=1e-6)
    assert_allclose(dtheta, numeric_gradient(lambda t: value(k.with_params(t), X_in, X_out), k.get_params()),
                    rtol=1e-4, atol=1e-6)


def test_sequence_score_is_the_conditional_density():
    X, model = circle()
    prefix = X[:6] + 0.01
    Xs_in, Xs_out = transitions(prefix, 1)
    mean, cov = model.predict(Xs_in)
    expected = sum(multivariate_normal(mean[:, q], cov).logpdf(Xs_out[:, q]) for q in range(2))
    assert sequence_score(model, prefix) == pytest.approx(expected, rel=1e-8)


def test_sequence_score_prefers_the_trained_motion():
    X, model = circle()
    reversed_motion = X[:8][::-1]
    assert sequence_score(model, X[:8]) > sequence_score(model, reversed_motion)


def test_sequence_score_needs_more_rows_than_order():
    X, model = circle(order=2)
    with pytest.raises(InsufficientPrefixError):
        sequence_score(model, X[:2])
    with pytest.raises(ShapeError):
        sequence_score(model, np.zeros((5, 3)))


def test_rollout_follows_training_transitions():
    X, model = circle()
    generated = rollout(model, X[:1], steps=3)
    assert generated.shape == (3, 2)
    assert_allclose(generated, X[1:4], atol=0.05)
    assert np.array_equal(generated, rollout(model, X[:1], steps=3))


def test_rollout_edge_cases():
    X, model = circle(order=2)
    assert rollout(model, X[:2], steps=0).shape == (0, 2)
    with pytest.raises(InsufficientPrefixError):
        rollout(model, X[:1], steps=3)


def test_hyperparameter_fit_improves_likelihood():
    X, model = circle()
    trace = ObjectiveTrace()
    fitted = fit_dynamics_hyperparameters(model, max_iter=30, trace=trace)
    before = dynamics_log_likelihood(model, model.X_in, model.X_out)
    after = dynamics_log_likelihood(fitted, fitted.X_in, fitted.X_out)
    assert after >= before
    assert trace.entries and trace.entries[-1]["objective"] == pytest.approx(after, rel=1e-8)


def test_long_rollout_stays_finite_and_near_the_orbit():
    X, model = circle()
    generated = rollout(model, X[:1], steps=500)
    assert generated.shape == (500, 2)
    assert np.all(np.isfinite(generated))
    # one period stays within 1.5x the training box
    assert np.all(np.abs(generated[:20]) <= 1.5)
