"""
Test suite for the utility modules: report writers, the worker pool,
logging configuration and version lookup.
"""

import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np
import pytest
import toml

from socverify.errors import ConfigError
from socverify.utils.concurrency import THREADS_ENV, ordered_map, worker_count
from socverify.utils.logging_config import get_logger, setup_logging
from socverify.utils.reports import ensure_dir, to_plain, write_json, write_rows_csv
from socverify.utils.version import _source_version, get_version


@pytest.mark.unit
class TestReports:
    """Test JSON and CSV report writers."""

    def test_to_plain(self):
        """Test conversion of numpy values, tuples and non-finite floats."""
        data = {
            "a": np.float64(1.5),
            "b": np.int64(3),
            "c": np.array([1.0, 2.0]),
            "d": (math.nan, math.inf),
            "e": np.bool_(True),
        }

        assert to_plain(data) == {"a": 1.5, "b": 3, "c": [1.0, 2.0], "d": [None, None], "e": True}

    def test_write_json_sorted(self, temp_dir):
        """Test that keys are sorted and parent directories created."""
        path = write_json(os.path.join(temp_dir, "deep", "report.json"), {"b": 1, "a": np.nan})

        text = open(path).read()
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": None, "b": 1}

    def test_ensure_dir_failure(self, temp_dir):
        """Test that a directory below a file raises ConfigError."""
        blocker = os.path.join(temp_dir, "file")
        with open(blocker, "w") as f:
            f.write("x")

        with pytest.raises(ConfigError):
            ensure_dir(os.path.join(blocker, "sub"))

    def test_write_rows_csv(self, temp_dir):
        """Test CSV rows with full-precision floats."""
        path = write_rows_csv(os.path.join(temp_dir, "rows.csv"), ["k", "value"], [[0, 0.1], [1, 1 / 3]])

        lines = open(path).read().splitlines()
        assert lines[0] == "k,value"
        assert lines[2] == f"1,{1 / 3!r}"

    def test_write_rows_csv_numpy_values(self, temp_dir):
        """Test that numpy scalars are written as plain numbers."""
        rows = [[np.int64(2), np.float64(0.1), np.nan]]

        path = write_rows_csv(os.path.join(temp_dir, "rows.csv"), ["k", "value", "order"], rows)

        assert open(path).read().splitlines()[1] == "2,0.1,nan"


@pytest.mark.unit
class TestConcurrency:
    """Test the worker pool."""

    def test_default_worker_count(self, monkeypatch):
        """Test the single-worker default."""
        monkeypatch.delenv(THREADS_ENV, raising=False)

        assert worker_count() == 1

    def test_worker_count_from_env(self, monkeypatch):
        """Test SOC_VERIFY_THREADS."""
        monkeypatch.setenv(THREADS_ENV, "4")

        assert worker_count() == 4

    @pytest.mark.parametrize("raw", ["many", "0", "-3"])
    def test_invalid_worker_count(self, monkeypatch, raw):
        """Test that invalid values fall back to one worker."""
        monkeypatch.setenv(THREADS_ENV, raw)

        assert worker_count() == 1

    def test_ordered_results(self):
        """Test that pooled results keep input order."""
        assert ordered_map(lambda v: v * v, range(20), workers=4) == [v * v for v in range(20)]

    def test_sequential_for_one_worker(self, mocker):
        """Test that one worker does not start a pool."""
        pool = mocker.patch("socverify.utils.concurrency.ThreadPoolExecutor")

        assert ordered_map(str, [1, 2], workers=1) == ["1", "2"]
        pool.assert_not_called()


@pytest.mark.unit
class TestLogging:
    """Test logging configuration."""

    def test_level_from_env(self, monkeypatch):
        """Test that SOC_VERIFY_LOG_LEVEL sets the level."""
        monkeypatch.setenv("SOC_VERIFY_LOG_LEVEL", "debug")

        logger = setup_logging()

        assert logger.level == logging.DEBUG
        assert len(logger.handlers) == 1

    def test_invalid_level(self, capsys):
        """Test that an invalid level falls back to INFO with a warning."""
        logger = setup_logging(log_level="LOUD")

        assert logger.level == logging.INFO
        assert "Invalid log level" in capsys.readouterr().out

    def test_repeated_setup_keeps_one_handler(self):
        """Test that handlers are replaced rather than stacked."""
        setup_logging(log_level="INFO")
        logger = setup_logging(log_level="WARNING")

        assert len(logger.handlers) == 1

    def test_console_handler_on_stderr(self):
        """Test that log records go to stderr and numpy warnings are captured."""
        logger = setup_logging(log_level="INFO")

        (handler,) = logger.handlers
        assert handler.stream is sys.stderr
        assert handler in logging.getLogger("py.warnings").handlers

    def test_get_logger_namespace(self):
        """Test that module loggers live under the package logger."""
        assert get_logger("socverify.ode.integrate").name == "socverify.ode.integrate"
        assert get_logger("tests").name == "socverify.tests"


@pytest.mark.unit
class TestVersion:
    """Test version lookup."""

    def test_matches_pyproject(self):
        """Test that the version is read from pyproject.toml."""
        root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        expected = toml.load(os.path.join(root, "pyproject.toml"))["project"]["version"]

        assert get_version() == expected

    def test_foreign_pyproject_ignored(self, temp_dir):
        """Test that a pyproject.toml of another project is not read."""
        path = os.path.join(temp_dir, "pyproject.toml")
        with open(path, "w") as f:
            toml.dump({"project": {"name": "other", "version": "9.9.9"}}, f)

        assert _source_version(Path(path)) is None

    def test_unreadable_pyproject(self, temp_dir):
        """Test that a missing file gives no version instead of raising."""
        assert _source_version(Path(temp_dir) / "missing.toml") is None
