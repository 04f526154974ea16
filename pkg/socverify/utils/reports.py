"""
Report writers.

Reports are JSON documents with sorted keys so that two runs with the same
configuration produce identical files; numpy scalars and arrays are converted
to plain Python values and non-finite floats are written as null.
"""

import csv
import json
import math
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import ConfigError
from .logging_config import get_logger

logger = get_logger(__name__)


def to_plain(value: Any) -> Any:
    """Recursively convert numpy values, tuples and non-finite floats for JSON."""
    if isinstance(value, Mapping):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating | float):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Path):
        return value.as_posix()
    return value


def ensure_dir(path: str | Path) -> Path:
    """Create a directory (and parents), raising ConfigError when that is impossible."""
    path = Path(path)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"cannot create output directory {path}: {e}") from e
    return path


def write_json(path: str | Path, data: Any) -> Path:
    """
    Write data as indented JSON with sorted keys.

    Args:
        path: Destination file; parent directories are created.
        data: JSON-like data, possibly holding numpy values.

    Returns:
        Path: The written file.

    Raises:
        ConfigError: If the file cannot be written.
    """
    path = Path(path)
    ensure_dir(path.parent)
    try:
        with open(path, "w") as f:
            json.dump(to_plain(data), f, indent=2, sort_keys=True, allow_nan=False)
            f.write("\n")
    except OSError as e:
        raise ConfigError(f"cannot write report {path}: {e}") from e
    logger.debug(f"wrote {path}")
    return path


def write_rows_csv(path: str | Path, header: list[str], rows: Iterable[Iterable[Any]]) -> Path:
    """
    Write a CSV file with a header row.

    Floats (numpy floats included) are written with repr so that they read back
    bit for bit.

    Args:
        path: Destination file; parent directories are created.
        header: Column names.
        rows: One iterable of cell values per row.

    Returns:
        Path: The written file.

    Raises:
        ConfigError: If the file cannot be written.
    """
    path = Path(path)
    ensure_dir(path.parent)
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            for row in rows:
                writer.writerow([_csv_cell(v) for v in row])
    except OSError as e:
        raise ConfigError(f"cannot write table {path}: {e}") from e
    logger.debug(f"wrote {path}")
    return path


def _csv_cell(value: Any) -> Any:
    if isinstance(value, np.floating | float):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value
