"""
Uniform time grid and grid-valued functions.

Every time-indexed quantity (states, adjoints, fundamental matrices, kernels)
lives on one TimeGrid. A GridFunction stores node values and the midpoint of
every interval so that Runge-Kutta stages of a later sweep can read it at
t_k, t_k + h/2 and t_{k+1} without leaving the grid.
"""

from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt

from ..errors import DomainError
from ..utils.reports import write_rows_csv

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """
    Uniform grid t_k = k T / N on [0, T].

    Attributes:
        horizon: Final time T.
        intervals: Number of intervals N.
    """

    horizon: float
    intervals: int

    def __post_init__(self) -> None:
        if not self.horizon > 0:
            raise DomainError(f"grid horizon must be positive, got {self.horizon}")
        if self.intervals < 1:
            raise DomainError(f"grid needs at least one interval, got {self.intervals}")
        nodes = np.linspace(0.0, self.horizon, self.intervals + 1)
        nodes.setflags(write=False)
        object.__setattr__(self, "_nodes", nodes)

    @property
    def step(self) -> float:
        return self.horizon / self.intervals

    @property
    def nodes(self) -> FloatArray:
        return self._nodes  # type: ignore[attr-defined]

    @property
    def midpoints(self) -> FloatArray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    def node_weights(self) -> FloatArray:
        """Length carried by each node: h for nodes 0..N-1, zero for node N."""
        weights = np.full(self.intervals + 1, self.step)
        weights[-1] = 0.0
        return weights

    def matches(self, other: "TimeGrid") -> bool:
        return self.intervals == other.intervals and self.horizon == other.horizon


@dataclass(frozen=True, eq=False)
class GridFunction:
    """
    Scalar, vector or matrix series sampled on a TimeGrid.

    Attributes:
        grid: The grid the series lives on.
        values: Node values, shape (N + 1, *shape).
        midpoints: Interval midpoint values, shape (N, *shape), or None.
        meta: Free-form diagnostics recorded by the producer.
    """

    grid: TimeGrid
    values: FloatArray
    midpoints: FloatArray | None = None
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape[0] != self.grid.intervals + 1:
            raise DomainError(
                f"series has {values.shape[0]} samples, grid needs {self.grid.intervals + 1}"
            )
        object.__setattr__(self, "values", values)
        if self.midpoints is not None:
            mids = np.asarray(self.midpoints, dtype=float)
            if mids.shape != (self.grid.intervals, *values.shape[1:]):
                raise DomainError("midpoint array does not match the node array")
            object.__setattr__(self, "midpoints", mids)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.values.shape[1:])

    def __getitem__(self, k: int) -> FloatArray:
        return self.values[k]

    def sample(self, t: float, k: int) -> FloatArray:
        """
        Value at time t inside interval k.

        Stage times t_k, t_k + h/2 and t_{k+1} return stored values exactly;
        other times use the quadratic through those three values (the interval's
        linear interpolant when no midpoints are stored).

        Args:
            t: Time inside [t_k, t_{k+1}].
            k: Interval index.

        Returns:
            The sampled value.
        """
        h = self.grid.step
        s = (t - self.grid.nodes[k]) / h
        left, right = self.values[k], self.values[k + 1]
        if abs(s) < 1e-9:
            return left
        if abs(s - 1.0) < 1e-9:
            return right
        if self.midpoints is None:
            return (1.0 - s) * left + s * right
        mid = self.midpoints[k]
        if abs(s - 0.5) < 1e-9:
            return mid
        return (
            2.0 * (s - 0.5) * (s - 1.0) * left
            - 4.0 * s * (s - 1.0) * mid
            + 2.0 * s * (s - 0.5) * right
        )

    def combine(self, other: "GridFunction", alpha: float, beta: float) -> "GridFunction":
        """Return alpha * self + beta * other (midpoints kept when both have them)."""
        mids = None
        if self.midpoints is not None and other.midpoints is not None:
            mids = alpha * self.midpoints + beta * other.midpoints
        return GridFunction(self.grid, alpha * self.values + beta * other.values, mids)

    def sup_distance(self, other: "GridFunction") -> float:
        """Largest absolute nodewise difference."""
        return float(np.max(np.abs(self.values - other.values), initial=0.0))

    def csv_header(self, name: str) -> list[str]:
        if not self.shape:
            return ["t", name]
        flat = int(np.prod(self.shape))
        if len(self.shape) == 1:
            return ["t", *[f"{name}[{i}]" for i in range(flat)]]
        rows, cols = self.shape
        return ["t", *[f"{name}[{i}][{j}]" for i in range(rows) for j in range(cols)]]

    def to_csv(self, path: str | Path, name: str = "value") -> Path:
        """
        Write one row per node: t followed by the flattened value (row-major).

        Args:
            path: Destination file.
            name: Column stem for the value columns.

        Returns:
            Path: The written file.
        """
        flat = self.values.reshape(self.values.shape[0], -1)
        rows = ([t, *row] for t, row in zip(self.grid.nodes, flat, strict=True))
        return write_rows_csv(path, self.csv_header(name), rows)
