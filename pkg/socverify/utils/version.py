"""
Package version lookup.

A source checkout reads the version from its pyproject.toml; an installed
package reads the distribution metadata. The version is recorded in every
run_meta.json, so it never raises.
"""

from functools import cache
from importlib import metadata
from pathlib import Path

import toml

DISTRIBUTION = "socverify"
UNKNOWN_VERSION = "0.0.0+unknown"


def _source_version(pyproject_path: Path) -> str | None:
    try:
        project = toml.load(pyproject_path).get("project", {})
    except (OSError, toml.TomlDecodeError):
        return None
    # an installed package may sit below some other project's pyproject.toml
    if project.get("name") != DISTRIBUTION:
        return None
    return project.get("version")


@cache
def get_version() -> str:
    """
    Version of socverify.

    Returns:
        str: The pyproject.toml version in a source checkout, else the installed
        distribution's version, else "0.0.0+unknown".
    """
    version = _source_version(Path(__file__).resolve().parents[2] / "pyproject.toml")
    if version is not None:
        return version
    try:
        return metadata.version(DISTRIBUTION)
    except metadata.PackageNotFoundError:
        return UNKNOWN_VERSION


__version__: str = get_version()
