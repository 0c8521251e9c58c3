"""
Tests for the configuration module.

This module tests tool settings and run configuration loading from
profiles and flag overrides.
"""

import json
from pathlib import Path

import pytest

from core.config import RunConfig, Settings, load_run_config, settings
from core.exceptions import FilterConfigError
from models.schemas import BaselineName, ErrorBiasPolicy, TaskName, TriangleGenParams


PROFILE_DIR = Path(__file__).resolve().parent.parent / "profiles"


class TestSettings:
    """Test cases for the Settings class."""

    def test_settings_default_values(self, monkeypatch):
        """Test default values for settings."""
        monkeypatch.delenv("TOPOBENCH_DEFAULT_SEED", raising=False)
        test_settings = Settings()

        assert test_settings.APP_NAME == "topobench"
        assert test_settings.DEFAULT_SEED == 7
        assert test_settings.WORKERS == 1
        assert test_settings.PROFILE_DIR == "profiles"

    def test_settings_with_environment_variables(self, monkeypatch):
        """Test settings loading from prefixed environment variables."""
        monkeypatch.setenv("TOPOBENCH_DEFAULT_SEED", "99")
        monkeypatch.setenv("TOPOBENCH_WORKERS", "4")
        monkeypatch.setenv("TOPOBENCH_OUTPUT_DIR", "/tmp/bench")

        test_settings = Settings()

        assert test_settings.DEFAULT_SEED == 99
        assert test_settings.WORKERS == 4
        assert test_settings.OUTPUT_DIR == "/tmp/bench"

    def test_unprefixed_variables_ignored(self, monkeypatch):
        """Test that variables without the prefix do not leak into settings."""
        monkeypatch.setenv("WORKERS", "16")

        assert Settings().WORKERS == 1

    def test_global_settings_instance(self):
        """Test that the module exposes a settings instance."""
        assert isinstance(settings, Settings)
        assert settings.VERSION


class TestRunConfig:
    """Test cases for RunConfig loading."""

    def test_defaults_are_desk_scale(self):
        """Test that defaults describe the desk-scale regime."""
        cfg = load_run_config()

        assert cfg.task == TaskName.TRIANGLES
        assert cfg.candidates == 20000
        assert cfg.filter.train_size == 1000
        assert cfg.filter.test_size == 200
        assert (cfg.filter.folds, cfg.filter.train_folds) == (10, 7)
        assert cfg.clique.ba_m == cfg.clique.clique_size - 2

    def test_flags_override_file(self, tmp_path):
        """Test that flag values win over the profile file."""
        profile = tmp_path / "profile.json"
        profile.write_text(json.dumps({"seed": 3, "candidates": 400, "filter": {"train_size": 100, "test_size": 20}}))

        cfg = load_run_config(str(profile), {"seed": 11, "train_size": 60, "test_size": None})

        assert cfg.seed == 11
        assert cfg.candidates == 400
        assert cfg.filter.train_size == 60
        assert cfg.filter.test_size == 20

    def test_nested_flags(self):
        """Test flat flags that land in nested sections."""
        cfg = load_run_config(
            overrides={"threshold": 3, "clique_size": 5, "baseline": "wl", "wl_iterations": 1, "samples": 50}
        )

        assert cfg.clique.distance_threshold == 3
        assert cfg.clique.clique_size == 5
        assert cfg.clique.ba_m == 3
        assert cfg.baseline == BaselineName.WL
        assert cfg.wl.iterations == 1
        assert cfg.graphlets.samples == 50

    def test_clique_size_flag_overrides_profile_ba_m(self, tmp_path):
        """Test that --clique-size is not blocked by a stale ba_m in the profile."""
        profile = tmp_path / "profile.json"
        profile.write_text(json.dumps({"clique": {"clique_size": 4, "ba_m": 2}}))

        cfg = load_run_config(str(profile), {"clique_size": 6})

        assert cfg.clique.ba_m == 4

    def test_train_folds_must_be_below_folds(self):
        """Test that m >= n is a configuration error."""
        with pytest.raises(FilterConfigError) as exc_info:
            load_run_config(overrides={"folds": 5, "train_folds": 5})

        assert exc_info.value.field_errors

    def test_splits_must_fit_candidates(self):
        """Test that train + test above the candidate count is rejected."""
        with pytest.raises(FilterConfigError):
            load_run_config(overrides={"candidates": 100, "train_size": 80, "test_size": 40})

    def test_odd_split_size_rejected(self):
        """Test that unbalanceable split sizes are rejected."""
        with pytest.raises(FilterConfigError):
            load_run_config(overrides={"train_size": 101})

    def test_unreadable_file(self, tmp_path):
        """Test that a missing profile is a configuration error."""
        with pytest.raises(FilterConfigError) as exc_info:
            load_run_config(str(tmp_path / "missing.json"))

        assert "missing.json" in exc_info.value.message

    @pytest.mark.parametrize("name", ["desk", "full"])
    def test_shipped_profiles_load(self, name):
        """Test that both shipped profiles validate."""
        cfg = load_run_config(str(PROFILE_DIR / f"{name}.json"))

        assert isinstance(cfg, RunConfig)
        assert cfg.filter.train_size + cfg.filter.test_size <= cfg.candidates
        assert cfg.filter.bias_policy == ErrorBiasPolicy.SCORE_MATCHED
        assert cfg.triangles == TriangleGenParams()

    def test_full_profile_scale(self):
        """Test the full-scale regime numbers."""
        cfg = load_run_config(str(PROFILE_DIR / "full.json"))

        assert cfg.candidates == 200000
        assert (cfg.filter.train_size, cfg.filter.test_size) == (10000, 1000)
