"""
Quadrature rules on the shared grid.

quad integrates node series that are continuous across nodes (composite
Simpson). Integrands that carry a piecewise-constant control jump at nodes and
go through quad_intervals, which applies Simpson inside each interval using the
stage values of that interval. Triangle integrals use the trapezoid rule in the
inner variable and quad in the outer one.
"""

from collections.abc import Callable
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.integrate import cumulative_trapezoid, simpson

from ..errors import QuadratureError
from ..utils.logging_config import get_logger
from .grid import GridFunction, TimeGrid

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]


class QuadResult(NamedTuple):
    """Quadrature value with the rule that produced it."""

    value: float
    method: str

    @property
    def trapezoid_tail(self) -> bool:
        return self.method == "simpson+trapezoid"


def _node_values(series: GridFunction | npt.ArrayLike) -> FloatArray:
    if isinstance(series, GridFunction):
        return series.values
    return np.asarray(series, dtype=float)


def quad(series: GridFunction | npt.ArrayLike, grid: TimeGrid) -> QuadResult:
    """
    Composite Simpson integral of a scalar node series.

    For odd N the first N - 1 intervals use Simpson and the last one the
    trapezoid rule; the result is flagged through its method.

    Args:
        series: N + 1 node samples.
        grid: Grid of the samples.

    Returns:
        QuadResult: Value and method.
    """
    y = _node_values(series)
    h = grid.step
    if grid.intervals % 2 == 0:
        return QuadResult(float(simpson(y, dx=h, axis=0)), "simpson")
    logger.warning(f"odd interval count {grid.intervals}: trapezoid on the last interval")
    head = float(simpson(y[:-1], dx=h, axis=0)) if grid.intervals > 1 else 0.0
    return QuadResult(head + 0.5 * h * float(y[-2] + y[-1]), "simpson+trapezoid")


def quad_intervals(left: npt.ArrayLike, mid: npt.ArrayLike, right: npt.ArrayLike, grid: TimeGrid) -> float:
    """
    Interval-wise Simpson sum of h/6 (l_k + 4 m_k + r_k).

    Args:
        left: Integrand at t_k with interval k's control, shape (N,).
        mid: Integrand at the midpoint of interval k, shape (N,).
        right: Integrand at t_{k+1} with interval k's control, shape (N,).
        grid: Grid of the samples.

    Returns:
        float: The integral.
    """
    return float(cumulative_quad_intervals(left, mid, right, grid)[-1])


def cumulative_quad_intervals(
    left: npt.ArrayLike, mid: npt.ArrayLike, right: npt.ArrayLike, grid: TimeGrid
) -> FloatArray:
    """
    Running interval-wise Simpson integral at every node (zero at t_0).

    Works on trailing value dimensions, so vector integrands give vector
    running integrals of shape (N + 1, n).
    """
    pieces = (grid.step / 6.0) * (
        np.asarray(left, dtype=float) + 4.0 * np.asarray(mid, dtype=float) + np.asarray(right, dtype=float)
    )
    running = np.zeros((grid.intervals + 1, *pieces.shape[1:]))
    running[1:] = np.cumsum(pieces, axis=0)
    return running


def tri_double_integral(kernel: Callable[[int, int], float], grid: TimeGrid) -> float:
    """
    Approximate the integral over 0 <= s <= t <= T of K(t, s).

    Each row t_k is integrated in s by the trapezoid rule over nodes 0..k in
    ascending order, then the row integrals go through quad in ascending t.

    Args:
        kernel: K(k, j) evaluated on node pairs with j <= k.
        grid: Time grid.

    Returns:
        float: The triangle integral.

    Raises:
        QuadratureError: On the first non-finite kernel value.
    """
    h = grid.step
    rows = np.zeros(grid.intervals + 1)
    for k in range(1, grid.intervals + 1):
        row = np.empty(k + 1)
        for j in range(k + 1):
            value = float(kernel(k, j))
            if not np.isfinite(value):
                raise QuadratureError(k, j)
            row[j] = value
        rows[k] = h * (row.sum() - 0.5 * (row[0] + row[-1]))
    return quad(rows, grid).value


def separable_tri_integral(outer: npt.ArrayLike, inner: npt.ArrayLike, grid: TimeGrid) -> float:
    """
    Triangle integral of K(t, s) = <outer(t), inner(s)> with the tri_double_integral rule.

    The inner trapezoid rows collapse to a cumulative trapezoid of the inner
    factor, which keeps the cost linear in N.

    Args:
        outer: Node values of the t factor, shape (N + 1, n).
        inner: Node values of the s factor, shape (N + 1, n).
        grid: Time grid.

    Returns:
        float: The triangle integral.
    """
    a = np.asarray(outer, dtype=float).reshape(grid.intervals + 1, -1)
    b = np.asarray(inner, dtype=float).reshape(grid.intervals + 1, -1)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        bad = int(np.flatnonzero(~np.isfinite(a).all(axis=1) | ~np.isfinite(b).all(axis=1))[0])
        raise QuadratureError(bad, bad)
    running = cumulative_trapezoid(b, dx=grid.step, axis=0, initial=0.0)
    rows = np.einsum("ki,ki->k", a, running)
    return quad(rows, grid).value
