# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Unit tests for settings resolution."""

import pytest
from pydantic import ValidationError

from app.errors import InvalidInputError
from app.settings import ENV_CONFIG, ENV_LOG_LEVEL, ENV_THREADS, Settings, load_settings


@pytest.mark.unit
class TestSettings:
    """Test cases for Settings and load_settings."""

    def test_defaults(self):
        """Test the built-in defaults."""
        settings = load_settings()
        assert settings == Settings()
        assert settings.threads == 1
        assert settings.precision_digits == 40
        assert settings.log_level == "WARNING"

    def test_yaml_file(self, sample_path):
        """Test values read from a config file."""
        settings = load_settings(sample_path("config.yaml"))
        assert settings.threads == 2
        assert settings.rational_max_denominator == 10 ** 6

    def test_config_from_environment(self, monkeypatch, sample_path):
        """Test the config path taken from the environment."""
        monkeypatch.setenv(ENV_CONFIG, sample_path("config.yaml"))
        assert load_settings().threads == 2

    def test_precedence(self, monkeypatch, sample_path):
        """Test keyword overrides beat environment beats YAML."""
        monkeypatch.setenv(ENV_THREADS, "3")
        monkeypatch.setenv(ENV_LOG_LEVEL, "info")
        settings = load_settings(sample_path("config.yaml"))
        assert settings.threads == 3
        assert settings.log_level == "INFO"
        assert load_settings(sample_path("config.yaml"), threads=5).threads == 5

    def test_none_overrides_ignored(self):
        """Test unset command line flags do not override anything."""
        assert load_settings(threads=None, log_level=None) == Settings()

    def test_missing_file(self):
        """Test a config path that does not exist."""
        with pytest.raises(FileNotFoundError):
            load_settings("no/such/config.yaml")

    def test_not_a_mapping(self, tmp_path):
        """Test a config file holding a list."""
        path = tmp_path / "config.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(InvalidInputError):
            load_settings(str(path))

    def test_broken_yaml(self, tmp_path):
        """Test a config file that is not YAML."""
        path = tmp_path / "config.yaml"
        path.write_text("threads: [1\n")
        with pytest.raises(InvalidInputError):
            load_settings(str(path))

    def test_empty_file(self, tmp_path):
        """Test an empty config file means defaults."""
        path = tmp_path / "config.yaml"
        path.write_text("")
        assert load_settings(str(path)) == Settings()

    @pytest.mark.parametrize(
        "overrides",
        [
            {"threads": 0},
            {"precision_digits": 10},
            {"tolerance_identity": 0},
            {"log_level": "LOUD"},
            {"unknown_key": 1},
        ],
    )
    def test_invalid_values(self, overrides):
        """Test out-of-range and unknown settings."""
        with pytest.raises(InvalidInputError):
            load_settings(**overrides)

    def test_frozen(self):
        """Test settings cannot be changed after resolution."""
        settings = Settings()
        with pytest.raises(ValidationError):
            settings.threads = 4
