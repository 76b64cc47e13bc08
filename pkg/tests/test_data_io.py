"""
Tests for sequence files, manifests, resampling and MCCV splits
"""
import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gpdmm.data.dataset import Sequence
from gpdmm.data.io import (
    load_dataset,
    mccv_split,
    read_sequence_file,
    resample,
    save_dataset,
    write_sequence_file,
)
from gpdmm.exceptions import LoadError, ShapeError, SplitError, TooShortError, UsageError


def test_sequence_file_round_trip_is_exact(tmp_path, rng):
    values = rng.normal(size=(7, 3)) * 1e3
    path = write_sequence_file(tmp_path / "s.csv", values)
    assert np.array_equal(read_sequence_file(path, 3), values)
    assert b"\r\n" not in path.read_bytes()


def test_single_row_file_stays_two_dimensional(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("1.0,2.0\n")
    assert read_sequence_file(path, 2).shape == (1, 2)


@pytest.mark.parametrize("content", ["1,2\n3\n", "1,2,3\n4,5,6\n", "1,nan\n2,3\n", "a,b\n"])
def test_bad_files_are_load_errors(tmp_path, content):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(LoadError):
        read_sequence_file(path, 2)


def test_missing_file(tmp_path):
    with pytest.raises(LoadError):
        read_sequence_file(tmp_path / "absent.csv", 2)


def test_sequence_validation():
    with pytest.raises(TooShortError):
        Sequence(values=np.zeros((1, 2)), class_label="a", source_id="x")
    with pytest.raises(ShapeError):
        Sequence(values=np.zeros(5), class_label="a", source_id="x")


def test_resample_preserves_endpoints_and_duration(rng):
    seq = Sequence(values=rng.normal(size=(11, 2)), class_label="a", source_id="x", dt=0.1)
    out = resample(seq, 21)
    assert out.length == 21
    assert np.array_equal(out.values[0], seq.values[0])
    assert np.array_equal(out.values[-1], seq.values[-1])
    assert_allclose(out.values[::2], seq.values, atol=1e-12)
    assert out.dt * 20 == pytest.approx(seq.dt * 10)
    with pytest.raises(UsageError):
        resample(seq, 1)


def test_dataset_round_trip(tmp_path, small_dataset):
    manifest = save_dataset(small_dataset, tmp_path)
    loaded = load_dataset(manifest)
    assert loaded.classes == small_dataset.classes
    assert loaded.dt == small_dataset.dt
    for a, b in zip(loaded.sequences, small_dataset.sequences):
        assert np.array_equal(a.values, b.values)


def test_manifest_resamples_to_target_length(tmp_path, rng):
    write_sequence_file(tmp_path / "a.csv", rng.normal(size=(9, 2)))
    write_sequence_file(tmp_path / "b.csv", rng.normal(size=(13, 2)))
    manifest = {"dataset_name": "mixed", "feature_count": 2, "target_length": 10, "dt": 0.1,
                "classes": [{"label": "x", "files": ["a.csv", "b.csv"]}]}
    (tmp_path / "m.json").write_text(json.dumps(manifest))
    dataset = load_dataset(tmp_path / "m.json")
    assert dataset.length == 10


def test_manifest_errors(tmp_path):
    with pytest.raises(LoadError):
        load_dataset(tmp_path / "absent.json")
    manifest = {"dataset_name": "dup", "feature_count": 2, "target_length": 10, "dt": 0.1,
                "classes": [{"label": "x", "files": ["a.csv"]}, {"label": "x", "files": ["b.csv"]}]}
    (tmp_path / "m.json").write_text(json.dumps(manifest))
    with pytest.raises(LoadError, match="classes"):
        load_dataset(tmp_path / "m.json")
    manifest["classes"] = [{"label": "x", "files": ["missing.csv"]}]
    (tmp_path / "m.json").write_text(json.dumps(manifest))
    with pytest.raises(LoadError):
        load_dataset(tmp_path / "m.json")


def test_split_has_one_training_sequence_per_class(small_dataset):
    split = mccv_split(small_dataset, seed=5, n_validation_per_class=1, n_test_per_class=2)
    assert len(split.train) == len(small_dataset.classes)
    assert {small_dataset.sequences[i].class_label for i in split.train} == set(small_dataset.classes)
    everything = split.train + split.validation + split.test
    assert len(set(everything)) == len(everything)
    assert split == mccv_split(small_dataset, seed=5, n_validation_per_class=1, n_test_per_class=2)


def test_split_needs_enough_sequences(small_dataset):
    with pytest.raises(SplitError):
        mccv_split(small_dataset, seed=0, n_validation_per_class=2, n_test_per_class=2)
    with pytest.raises(UsageError):
        mccv_split(small_dataset, seed=0, n_validation_per_class=-1, n_test_per_class=2)
