"""
Configuration loader for TOML run files used by socverify.

This module provides the ConfigLoader class which loads a run configuration
from a TOML file, reloads it when the file's modification time changes, and
writes a default file when the requested one does not exist.
"""

import copy
import os
from datetime import datetime
from pathlib import Path
from typing import Any

import toml

from ..errors import ConfigError
from .logging_config import get_logger

logger = get_logger(__name__)

DEFAULT_CONFIG: dict[str, dict[str, Any]] = {
    "run": {
        "problem": "P2",
        "grid_n": 1000,
        "domain_samples": 401,
        "output_dir": "results",
        "suites": False,
    },
    "tolerances": {
        "eta_pmp": 2e-3,
        "eta_soc": 1e-4,
        "tol_fd": 1e-6,
        "tol_inv": 1e-8,
        "tol_growth": 1e-9,
    },
    "relaxation": {
        "alpha_list": [0.2, 0.1, 0.05],
        "eps_list": [0.25, 0.125, 0.0625, 0.03125, 0.015625],
        "chatter_alpha": 0.5,
    },
    "family": {
        "constants": True,
        "switches": 20,
        "random": 50,
        "seed": 0,
        "eps0": 1.0,
    },
    "audit": {
        "samples": 200,
        "seed": 0,
    },
}


def default_config() -> dict[str, dict[str, Any]]:
    """Return a fresh copy of the built-in defaults."""
    return copy.deepcopy(DEFAULT_CONFIG)


class ConfigLoader:
    """
    Handles loading and reloading of a TOML run configuration.

    Tracks the file's modification time to avoid unnecessary reloads and
    creates the file with the built-in defaults when it is missing.

    Attributes:
        path (Path): Location of the TOML file.
        config (Dict[str, Any]): Loaded configuration tables.
    """

    def __init__(self, path: str | Path = "config/config.toml") -> None:
        """
        Initialize the ConfigLoader.

        Args:
            path: TOML file to load.
        """
        self.path = Path(path)
        self.config: dict[str, Any] = {}
        self._last_mod_time: float | None = None

    def load(self) -> dict[str, Any]:
        """
        Load the configuration, reloading only when the file changed.

        Creates the file with the defaults when it does not exist.

        Returns:
            Dict[str, Any]: The configuration tables.

        Raises:
            ConfigError: If the file cannot be parsed or created.
        """
        try:
            current_mod_time = os.path.getmtime(self.path)
            if current_mod_time != self._last_mod_time:
                with open(self.path) as f:
                    self.config = toml.load(f)
                self._last_mod_time = current_mod_time
                logger.debug(f"Run config {self.path} reloaded at {datetime.now()}")
        except FileNotFoundError:
            logger.info(f"Run config {self.path} not found, writing defaults")
            self.config = default_config()
            if not self.save():
                raise ConfigError(f"cannot create default config at {self.path}") from None
        except toml.TomlDecodeError as e:
            logger.error(f"Error parsing run config {self.path}: {e}")
            raise ConfigError(f"invalid TOML in {self.path}: {e}") from e
        return self.config

    def save(self) -> bool:
        """
        Save the current configuration to file.

        Returns:
            bool: True if save was successful, False otherwise.
        """
        try:
            if self.path.parent != Path(""):
                os.makedirs(self.path.parent, exist_ok=True)
            with open(self.path, "w") as f:
                toml.dump(self.config, f)
            self._last_mod_time = os.path.getmtime(self.path)
            return True
        except OSError as e:
            logger.error(f"Error saving run config: {e}")
            return False
