"""
Fixed-step classical Runge-Kutta sweeps on a TimeGrid.

Fields take the active interval index so that piecewise-constant controls and
stage-sampled coefficients are read from the interval being stepped across,
including at its right boundary.
"""

from collections.abc import Callable
from typing import Literal

import numpy as np
import numpy.typing as npt

from ..errors import DivergenceError
from ..utils.logging_config import get_logger
from .grid import GridFunction, TimeGrid

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]
Field = Callable[[float, FloatArray, int], FloatArray]
Direction = Literal["forward", "backward"]


def rk4_step(field: Field, t: float, y: FloatArray, h: float, k: int) -> tuple[FloatArray, FloatArray]:
    """
    One classical RK4 step of size h (negative for backward sweeps).

    Args:
        field: Right-hand side field(t, y, k).
        t: Start time of the step.
        y: State at t.
        h: Signed step.
        k: Interval index the step crosses.

    Returns:
        tuple: (state at t + h, slope at t).
    """
    k1 = field(t, y, k)
    k2 = field(t + 0.5 * h, y + 0.5 * h * k1, k)
    k3 = field(t + 0.5 * h, y + 0.5 * h * k2, k)
    k4 = field(t + h, y + h * k3, k)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), k1


def _hermite_mid(y_left: FloatArray, y_right: FloatArray, s_left: FloatArray, s_right: FloatArray, h: float) -> FloatArray:
    return 0.5 * (y_left + y_right) + (h / 8.0) * (s_left - s_right)


def integrate(
    field: Field,
    y0: npt.ArrayLike,
    grid: TimeGrid,
    direction: Direction = "forward",
    label: str = "state",
) -> GridFunction:
    """
    Integrate y' = field(t, y, k) on every interval of the grid.

    Forward sweeps start from y0 at t = 0, backward sweeps place y0 at t = T.
    Interval midpoints are reconstructed with the cubic Hermite interpolant
    built from the slopes at both ends of the interval.

    Args:
        field: Right-hand side; k is the interval being crossed.
        y0: Initial (forward) or terminal (backward) value.
        grid: Time grid.
        direction: "forward" or "backward".
        label: Name used in error messages.

    Returns:
        GridFunction: Node and midpoint values.

    Raises:
        DivergenceError: If a non-finite value appears, with the node index.
    """
    y_init = np.array(y0, dtype=float)
    n = grid.intervals
    h = grid.step
    nodes = grid.nodes
    values = np.empty((n + 1, *y_init.shape))
    mids = np.empty((n, *y_init.shape))

    if direction == "forward":
        values[0] = y_init
        for k in range(n):
            y_next, slope_left = rk4_step(field, nodes[k], values[k], h, k)
            if not np.all(np.isfinite(y_next)):
                logger.error(f"{label} diverged at node {k + 1}")
                raise DivergenceError(k + 1, label)
            values[k + 1] = y_next
            slope_right = field(nodes[k + 1], y_next, k)
            mids[k] = _hermite_mid(values[k], y_next, slope_left, slope_right, h)
    elif direction == "backward":
        values[n] = y_init
        for k in range(n - 1, -1, -1):
            y_prev, slope_right = rk4_step(field, nodes[k + 1], values[k + 1], -h, k)
            if not np.all(np.isfinite(y_prev)):
                logger.error(f"{label} diverged at node {k}")
                raise DivergenceError(k, label)
            values[k] = y_prev
            slope_left = field(nodes[k], y_prev, k)
            mids[k] = _hermite_mid(y_prev, values[k + 1], slope_left, slope_right, h)
    else:
        raise ValueError(f"unknown direction {direction!r}")

    logger.debug(f"integrated {label} {direction} over {n} steps")
    return GridFunction(grid, values, mids)
