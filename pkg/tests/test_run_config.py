"""
Tests for run-level configuration and settings
"""
import json

import pytest
from pydantic import ValidationError

from gpdmm.config import Settings
from gpdmm.exceptions import UsageError
from gpdmm.models.run_config import RunConfig, SearchSpace, resolve_config


def test_defaults():
    config = resolve_config()
    assert config.prefix_fraction == 0.4
    assert config.latent.markov_order == 1
    assert config.train.fitc_inducing is None


def test_file_then_flags(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"seed": 3, "latent": {"fourier_order": 3}, "train": {"rounds": 7}}))
    config = resolve_config(path, {"fourier_order": 1, "rounds": None, "workers": 2})
    assert config.seed == 3
    assert config.latent.fourier_order == 1
    assert config.train.rounds == 7
    assert config.workers == 2 and config.train.workers == 2


def test_invalid_value_names_the_field():
    with pytest.raises(UsageError, match="prefix_fraction"):
        resolve_config(None, {"prefix_fraction": 1.5})
    with pytest.raises(UsageError, match="latent.markov_order"):
        resolve_config(None, {"markov_order": 3})


def test_unreadable_files(tmp_path):
    with pytest.raises(UsageError):
        resolve_config(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(UsageError):
        resolve_config(bad)


def test_manifest_is_required_for_data_commands():
    with pytest.raises(UsageError):
        RunConfig().require_manifest()


def test_search_space_validation():
    assert SearchSpace(fourier_order=[]).empty_axes() == ["fourier_order"]
    with pytest.raises(ValidationError):
        SearchSpace(emission_variance_scale=[2.0, 1.0])
    with pytest.raises(ValidationError):
        SearchSpace(markov_order=[3])


def test_settings_validation():
    assert Settings(LOG_LEVEL="debug").LOG_LEVEL == "DEBUG"
    with pytest.raises(ValidationError):
        Settings(LOG_LEVEL="chatty")
    with pytest.raises(ValidationError):
        Settings(WORKERS=0)


def test_missing_model_path_is_reported():
    with pytest.raises(RuntimeError):
        Settings(MODEL_PATH=None).resolve_model_path()
