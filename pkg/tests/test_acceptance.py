"""
End-to-end runs on the synthetic suites; minutes rather than seconds

Run with: pytest -m slow
"""
import pytest

from gpdmm.data.io import mccv_split
from gpdmm.experiments.evaluation import evaluate
from gpdmm.gp.mixture import sparsify, train
from gpdmm.models.data import default_synth_spec, overlapping_synth_spec
from gpdmm.models.latent import Geometry, LatentConfig, TrainOptions
from gpdmm.simulator.generator import synth_generate

pytestmark = pytest.mark.slow

OPTIONS = TrainOptions(rounds=10, emission_steps=30, dynamics_steps=30, polish_steps=60)
LATENT = LatentConfig(fourier_order=2, reduction_dims=3)
PREFIX = 0.4


def _suite(spec, seed):
    dataset = synth_generate(spec, seed=seed)
    split = mccv_split(dataset, seed=seed, n_validation_per_class=0, n_test_per_class=5)
    return dataset, split


@pytest.fixture(scope="module")
def separable():
    return _suite(default_synth_spec(), seed=0)


@pytest.fixture(scope="module")
def mixture_model(separable):
    dataset, split = separable
    return train(dataset.subset(split.train), LATENT, OPTIONS)


def test_separable_suite_classification_and_generation(separable, mixture_model):
    dataset, split = separable
    report, outcomes = evaluate(mixture_model, dataset, split.test, PREFIX)
    assert report.f1_macro == 1.0
    assert all(abs(o.posterior.sum() - 1.0) < 1e-9 for o in outcomes)
    assert report.frechet_avg <= 0.25
    assert 0.8 <= report.dampening_ratio <= 1.5
    assert 0.8 <= report.ldj_ratio <= 1.5


def test_training_prefixes_classify_correctly(separable, mixture_model):
    dataset, split = separable
    report, _ = evaluate(mixture_model, dataset, split.train, PREFIX)
    assert report.f1_macro == 1.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_pooled_dynamics_generate_worse(seed):
    dataset, split = _suite(default_synth_spec(), seed=seed)
    training = dataset.subset(split.train)
    mixture = train(training, LATENT, OPTIONS)
    pooled = train(training, LATENT, OPTIONS.model_copy(update={"pooled_dynamics": True}))
    mixture_report, _ = evaluate(mixture, dataset, split.test, PREFIX)
    pooled_report, _ = evaluate(pooled, dataset, split.test, PREFIX)
    assert pooled_report.frechet_avg > mixture_report.frechet_avg


def test_fitc_at_half_the_transitions_keeps_classification(separable, mixture_model):
    dataset, split = separable
    half = mixture_model.experts[0].n // 2
    report, _ = evaluate(sparsify(mixture_model, half), dataset, split.test, PREFIX)
    assert report.f1_macro == 1.0


def test_fourier_geometry_helps_on_overlapping_classes():
    wins = 0
    for seed in range(3):
        dataset, split = _suite(overlapping_synth_spec(), seed=seed)
        training = dataset.subset(split.train)
        scores = {}
        for geometry in (Geometry.FOURIER, Geometry.NONE):
            latent = LATENT.model_copy(update={"geometry": geometry})
            report, _ = evaluate(train(training, latent, OPTIONS), dataset, split.test, PREFIX)
            scores[geometry] = float("inf") if report.frechet_avg is None else report.frechet_avg
        wins += scores[Geometry.FOURIER] <= scores[Geometry.NONE]
    assert wins >= 2
