"""
Shared fixtures: a small synthetic dataset and one quickly trained model
"""
import numpy as np
import pytest

from gpdmm.data.io import mccv_split
from gpdmm.gp.mixture import train
from gpdmm.gp.serialization import save_model
from gpdmm.models.data import default_synth_spec
from gpdmm.models.latent import LatentConfig, TrainOptions
from gpdmm.simulator.generator import synth_generate


def numeric_gradient(fun, x, h=1e-6):
    """Central finite differences of a scalar function"""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    flat = grad.reshape(-1)
    for i in range(x.size):
        step = np.zeros(x.size)
        step[i] = h
        step = step.reshape(x.shape)
        flat[i] = (fun(x + step) - fun(x - step)) / (2 * h)
    return grad


@pytest.fixture(scope="session")
def small_spec():
    return default_synth_spec(classes=2, feature_count=4, length=24, trials=4, noise=0.01)


@pytest.fixture(scope="session")
def small_dataset(small_spec):
    return synth_generate(small_spec, seed=3)


@pytest.fixture(scope="session")
def small_split(small_dataset):
    return mccv_split(small_dataset, seed=0, n_validation_per_class=1, n_test_per_class=2)


@pytest.fixture(scope="session")
def latent_config():
    return LatentConfig(fourier_order=1, reduction_dims=2)


@pytest.fixture(scope="session")
def fast_options():
    return TrainOptions(rounds=2, emission_steps=15, dynamics_steps=15, polish_steps=10)


@pytest.fixture(scope="session")
def trained_model(small_dataset, small_split, latent_config, fast_options):
    return train(small_dataset.subset(small_split.train), latent_config, fast_options)


@pytest.fixture(scope="session")
def model_path(trained_model, tmp_path_factory):
    return save_model(trained_model, tmp_path_factory.mktemp("model") / "model.json")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
