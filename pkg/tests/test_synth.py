"""
Tests for the synthetic motion generator
"""
import numpy as np
import pytest

from gpdmm.exceptions import UsageError
from gpdmm.models.data import SynthSpec, default_synth_spec, overlapping_synth_spec
from gpdmm.simulator.generator import SyntheticMotionGenerator, synth_generate


def test_counts_and_shapes():
    dataset = synth_generate(default_synth_spec(), seed=0)
    assert len(dataset.classes) == 4
    assert len(dataset.sequences) == 24
    assert dataset.D == 12 and dataset.length == 120
    assert dataset.sequences[0].source_id == "motion_0_00"


def test_same_seed_same_data():
    a = synth_generate(default_synth_spec(classes=2, trials=2), seed=11)
    b = synth_generate(default_synth_spec(classes=2, trials=2), seed=11)
    c = synth_generate(default_synth_spec(classes=2, trials=2), seed=12)
    assert all(np.array_equal(x.values, y.values) for x, y in zip(a.sequences, b.sequences))
    assert not np.array_equal(a.sequences[0].values, c.sequences[0].values)


def test_trials_regenerate_independently():
    spec = default_synth_spec(classes=2, trials=3)
    full = synth_generate(spec, seed=4)
    alone = SyntheticMotionGenerator(spec, seed=4).generate_trial(1, 2)
    assert np.array_equal(full.sequences[5].values, alone)


def test_noise_free_trials_coincide():
    dataset = synth_generate(default_synth_spec(classes=1, trials=3, noise=0.0), seed=0)
    first = dataset.sequences[0].values
    assert all(np.array_equal(first, seq.values) for seq in dataset.sequences[1:])


def test_classes_differ_and_trials_vary():
    dataset = synth_generate(default_synth_spec(classes=2, trials=2), seed=0)
    a0, a1, b0, _ = (seq.values for seq in dataset.sequences)
    within = np.linalg.norm(a0 - a1)
    between = np.linalg.norm(a0 - b0)
    assert 0 < within < between


def test_overlapping_suite_shares_base_frequency():
    spec = overlapping_synth_spec()
    assert {c.frequencies[0] for c in spec.classes} == {1.0}


def test_spec_validation():
    with pytest.raises(ValueError):
        SynthSpec(classes=[{"label": "a", "frequencies": [1.0]}, {"label": "a", "frequencies": [2.0]}])
    with pytest.raises(UsageError):
        SyntheticMotionGenerator(SynthSpec.model_construct(classes=[]))
