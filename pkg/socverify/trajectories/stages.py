"""
Derivative tables along a solved trajectory.

Linearised equations need f, f0 and their state derivatives at every
Runge-Kutta stage time t_k, t_k + h/2, t_{k+1} of every interval, evaluated on
the reference trajectory with the interval's control value. A StageTable holds
those 3N evaluations so that each sweep reads them instead of re-evaluating.
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from ..ode.grid import GridFunction, TimeGrid
from ..problems.models import DynamicsEval, FloatArray, PiecewiseControl, Problem, eval_stack

Stage = tuple[DynamicsEval, DynamicsEval, DynamicsEval]


@dataclass(frozen=True, eq=False)
class StageTable:
    """
    Evaluations at (left, midpoint, right) of every interval.

    Attributes:
        grid: Time grid.
        evals: One (left, mid, right) triple per interval.
    """

    grid: TimeGrid
    evals: tuple[Stage, ...]

    def at(self, t: float, k: int) -> DynamicsEval:
        """Evaluation at the stage time of interval k nearest to t."""
        stage = int(round(2.0 * (t - self.grid.nodes[k]) / self.grid.step))
        return self.evals[k][min(max(stage, 0), 2)]

    def stage_series(
        self, getter: Callable[[DynamicsEval], FloatArray | float]
    ) -> tuple[FloatArray, FloatArray, FloatArray]:
        """Left, midpoint and right values of getter, each of shape (N, ...)."""
        left = np.array([getter(e[0]) for e in self.evals])
        mid = np.array([getter(e[1]) for e in self.evals])
        right = np.array([getter(e[2]) for e in self.evals])
        return left, mid, right


def stage_table(problem: Problem, x: GridFunction, control: PiecewiseControl) -> StageTable:
    """
    Evaluate the problem along x with the control of each interval.

    Args:
        problem: Problem to evaluate.
        x: Reference trajectory with midpoints.
        control: Control whose interval values are used.

    Returns:
        StageTable: The 3N evaluations.
    """
    grid = x.grid
    if x.midpoints is None:
        raise ValueError("stage tables need a trajectory with midpoint values")
    nodes, mids = grid.nodes, grid.midpoints
    evals = []
    for k in range(grid.intervals):
        u = control.payload(k)
        evals.append(
            (
                eval_stack(problem, float(nodes[k]), x.values[k], u),
                eval_stack(problem, float(mids[k]), x.midpoints[k], u),
                eval_stack(problem, float(nodes[k + 1]), x.values[k + 1], u),
            )
        )
    return StageTable(grid, tuple(evals))
