"""
Test suite for ConfigLoader and the layered run configuration.

Tests cover loading, default-file creation, reloading on modification,
parse errors, and the defaults < file < flags precedence of RunConfig.
"""

import os

import pytest
import toml

from socverify.cli.config import RunConfig, flatten_tables, load_run_config
from socverify.errors import ConfigError
from socverify.utils.config_loader import DEFAULT_CONFIG, ConfigLoader, default_config


@pytest.mark.unit
class TestConfigLoader:
    """Test ConfigLoader functionality."""

    def test_init(self, temp_dir):
        """Test ConfigLoader initialization."""
        loader = ConfigLoader(os.path.join(temp_dir, "run.toml"))

        assert loader.config == {}
        assert loader._last_mod_time is None

    def test_create_missing_config_file(self, temp_dir):
        """Test that a missing file is written with the defaults."""
        path = os.path.join(temp_dir, "config", "run.toml")
        loader = ConfigLoader(path)

        config = loader.load()

        assert os.path.exists(path)
        assert config == DEFAULT_CONFIG
        assert toml.load(path)["run"]["problem"] == "P2"

    def test_load_existing_config(self, temp_dir):
        """Test loading an existing file."""
        path = os.path.join(temp_dir, "run.toml")
        with open(path, "w") as f:
            toml.dump({"run": {"problem": "P3", "grid_n": 400}}, f)

        config = ConfigLoader(path).load()

        assert config["run"]["problem"] == "P3"
        assert config["run"]["grid_n"] == 400

    def test_config_file_reloading(self, temp_dir):
        """Test reloading after the file's modification time changes."""
        path = os.path.join(temp_dir, "run.toml")
        with open(path, "w") as f:
            toml.dump({"run": {"grid_n": 200}}, f)
        loader = ConfigLoader(path)
        loader.load()

        with open(path, "w") as f:
            toml.dump({"run": {"grid_n": 600}}, f)
        stat = os.stat(path)
        os.utime(path, (stat.st_atime, stat.st_mtime + 10))

        assert loader.load()["run"]["grid_n"] == 600

    def test_no_reload_without_change(self, temp_dir, mocker):
        """Test that an unchanged file is not parsed again."""
        path = os.path.join(temp_dir, "run.toml")
        with open(path, "w") as f:
            toml.dump({"run": {"grid_n": 200}}, f)
        loader = ConfigLoader(path)
        loader.load()
        spy = mocker.spy(toml, "load")

        loader.load()

        spy.assert_not_called()

    def test_invalid_toml(self, temp_dir):
        """Test that unparsable TOML raises ConfigError."""
        path = os.path.join(temp_dir, "broken.toml")
        with open(path, "w") as f:
            f.write("[run\nproblem = ")

        with pytest.raises(ConfigError):
            ConfigLoader(path).load()

    def test_save_failure(self, temp_dir):
        """Test that save reports failure for an unwritable location."""
        blocker = os.path.join(temp_dir, "file")
        with open(blocker, "w") as f:
            f.write("x")
        loader = ConfigLoader(os.path.join(blocker, "run.toml"))
        loader.config = default_config()

        assert loader.save() is False

    def test_default_copy_is_fresh(self):
        """Test that default_config returns an independent copy."""
        config = default_config()
        config["run"]["problem"] = "P1"

        assert DEFAULT_CONFIG["run"]["problem"] == "P2"


@pytest.mark.unit
class TestRunConfig:
    """Test validation and layering of the run configuration."""

    def test_defaults(self):
        """Test the built-in defaults."""
        config = load_run_config()

        assert config == RunConfig()
        assert config.problem_id == "P2"
        assert config.alpha_list == (0.2, 0.1, 0.05)
        assert str(config.problem_dir) == os.path.join("results", "P2")

    def test_precedence(self, temp_dir):
        """Test that flags override the file and the file overrides the defaults."""
        path = os.path.join(temp_dir, "run.toml")
        with open(path, "w") as f:
            toml.dump({"run": {"problem": "P1", "grid_n": 200}, "family": {"seed": 3}}, f)

        config = load_run_config(path, {"grid_n": 400, "eta_soc": None})

        assert config.problem_id == "P1"
        assert config.grid_n == 400
        assert config.seed == 3
        assert config.eta_soc == RunConfig().eta_soc

    def test_unknown_key(self):
        """Test that unknown keys raise ConfigError."""
        with pytest.raises(ConfigError):
            flatten_tables({"run": {"colour": "blue"}})

    def test_non_table_entry(self):
        """Test that top-level scalars raise ConfigError."""
        with pytest.raises(ConfigError):
            flatten_tables({"run": 3})

    @pytest.mark.parametrize(
        "overrides",
        [
            {"grid_n": 11},
            {"grid_n": 4},
            {"eta_pmp": 0.0},
            {"alpha_list": (0.5, 1.5)},
            {"eps_list": (0.1, -0.1)},
            {"chatter_alpha": 2.0},
            {"family_random": -1},
            {"probe": -2},
            {"audit_samples": 1},
        ],
    )
    def test_invalid_values(self, overrides):
        """Test that out-of-range values raise ConfigError."""
        with pytest.raises(ConfigError):
            load_run_config(None, overrides)

    def test_wrong_type(self):
        """Test that a value of the wrong type raises ConfigError."""
        with pytest.raises(ConfigError):
            load_run_config(None, {"alpha_list": ("a",)})

    def test_lists_become_tuples(self, temp_dir):
        """Test that TOML arrays are stored as float tuples."""
        path = os.path.join(temp_dir, "run.toml")
        with open(path, "w") as f:
            toml.dump({"relaxation": {"eps_list": [0.5, 0.25]}}, f)

        config = load_run_config(path)

        assert config.eps_list == (0.5, 0.25)
        assert config.to_dict()["eps_list"] == (0.5, 0.25)
