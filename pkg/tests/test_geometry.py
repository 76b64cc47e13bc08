"""
Tests for the progression vector, Fourier features and latent initialization
"""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from gpdmm.exceptions import ShapeError, TooShortError, UsageError
from gpdmm.latent.geometry import (
    TWO_PI,
    build_latent_init,
    fourier_features,
    fourier_multipliers,
    pca_features,
    progression,
)
from gpdmm.models.latent import Geometry, LatentConfig


def test_progression_spans_zero_to_two_pi(rng):
    Y = np.cumsum(rng.normal(size=(30, 3)), axis=0)
    theta = progression(Y)
    assert theta[0] == 0.0
    assert theta[-1] == TWO_PI
    assert np.all(np.diff(theta) > 0)


def test_constant_speed_gives_uniform_progression():
    Y = np.outer(np.arange(11), [1.0, 2.0])
    assert_allclose(progression(Y), np.linspace(0, TWO_PI, 11), atol=1e-12)


def test_slow_segments_take_larger_steps():
    steps = np.concatenate([np.full(5, 0.1), np.full(5, 1.0)])
    Y = np.concatenate([[0.0], np.cumsum(steps)])[:, None]
    increments = np.diff(progression(Y))
    assert increments[0] > increments[-1]


def test_double_velocity_halves_the_step():
    steps = np.concatenate([np.full(4, 1.0), np.full(4, 2.0)])
    Y = np.concatenate([[0.0], np.cumsum(steps)])[:, None]
    increments = np.diff(progression(Y, epsilon=1e-12))
    assert_allclose(increments[4:] / increments[:4], 0.5, rtol=1e-9)
    assert_allclose(increments[:4], increments[0], rtol=1e-12)


def test_stationary_sequence_is_still_defined():
    theta = progression(np.ones((5, 2)))
    assert_allclose(theta, np.linspace(0, TWO_PI, 5))


def test_progression_needs_two_frames():
    with pytest.raises(TooShortError):
        progression(np.zeros((1, 3)))


def test_fourier_feature_layout():
    theta = np.linspace(0, TWO_PI, 7)
    F = fourier_features(theta, m=2)
    assert F.shape == (7, 5)
    assert_allclose(F[:, 0], 1.0)
    assert_allclose(F[:, 1], np.cos(2 * np.pi * theta))
    assert_allclose(F[:, 4], np.sin(3 * np.pi * theta))
    assert fourier_features(theta, m=2, include_constant=False).shape == (7, 4)
    assert_allclose(fourier_multipliers(3), [2.0, 3.0, 4.0])


def test_fourier_order_must_be_positive():
    with pytest.raises(UsageError):
        fourier_features(np.zeros(3), m=0)


def test_pca_rank_is_checked(rng):
    with pytest.raises(ShapeError):
        pca_features(rng.normal(size=(5, 3)), r=4)


def test_pca_signs_are_deterministic(rng):
    Y = rng.normal(size=(20, 4))
    a, components, _ = pca_features(Y, 2, return_model=True)
    b = pca_features(-Y, 2)
    idx = np.argmax(np.abs(components), axis=1)
    assert np.all(components[np.arange(2), idx] > 0)
    assert_allclose(np.abs(a), np.abs(b), atol=1e-10)


def test_latent_init_layout(small_dataset):
    config = LatentConfig(fourier_order=2, reduction_dims=3)
    init = build_latent_init(small_dataset, config)
    N = sum(seq.length for seq in small_dataset.sequences)
    assert init.X.shape == (N, 5 + 3)
    assert init.bounds[0] == 0 and init.bounds[-1] == N
    assert_allclose(init.X[:, :5], init.X_G)
    assert np.std(init.X_R[:, 0]) == pytest.approx(1.0)


def test_pca_only_geometry(small_dataset):
    config = LatentConfig(reduction_dims=3, geometry=Geometry.NONE)
    init = build_latent_init(small_dataset, config)
    assert init.X_G.shape[1] == 0
    assert init.X.shape[1] == config.latent_dim == 3


def test_latent_init_needs_equal_lengths(rng):
    with pytest.raises(ShapeError):
        build_latent_init([rng.normal(size=(10, 3)), rng.normal(size=(12, 3))], LatentConfig(reduction_dims=2))


def test_full_rank_pca_reconstructs_the_data(rng):
    Y = rng.normal(size=(12, 5)) @ np.diag([3.0, 2.0, 1.0, 0.5, 0.1])
    scores, components, mean = pca_features(Y, r=5, return_model=True)
    assert_allclose(scores @ components + mean, Y, atol=1e-8)


def test_rank_deficient_data_is_zero_padded_with_a_warning(rng, caplog):
    sequences = [rng.normal(size=(10, 2)) for _ in range(2)]
    with caplog.at_level("WARNING", logger="gpdmm.latent.geometry"):
        init = build_latent_init(sequences, LatentConfig(fourier_order=1, reduction_dims=4))
    assert init.X_R.shape == (20, 4)
    assert_allclose(init.X_R[:, 2:], 0.0)
    assert "columnas de ceros" in caplog.text
