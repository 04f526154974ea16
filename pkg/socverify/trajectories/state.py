"""
State trajectories and costs for plain controls and two-point mixtures.

A mixture (1 - alpha) delta_base + alpha delta_probe acts on the dynamics and
the running cost as the convex blend of their values at the two controls, so
both kinds of control share one forward sweep.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np

from ..errors import DomainError, EvaluationError
from ..ode.grid import GridFunction, TimeGrid
from ..ode.integrate import integrate
from ..ode.quadrature import quad_intervals
from ..problems.models import FloatArray, PiecewiseControl, Problem, RelaxedMixture, blend
from ..utils.logging_config import get_logger

logger = get_logger(__name__)

Control = PiecewiseControl | RelaxedMixture


@dataclass(frozen=True, eq=False)
class TrajectoryBundle:
    """
    A solved state trajectory with its cost.

    Attributes:
        x: State on the grid, shape (N + 1, n) with midpoints.
        j: Cost J, the integral of the running cost.
        control_desc: "control" or "mixture(alpha=...)".
        control: The control or mixture that produced the trajectory.
    """

    x: GridFunction
    j: float
    control_desc: str
    control: Control


def _parts(control: Control) -> tuple[PiecewiseControl, PiecewiseControl, float]:
    if isinstance(control, RelaxedMixture):
        return control.base, control.probe, control.alpha
    return control, control, 0.0


def describe(control: Control) -> str:
    if isinstance(control, RelaxedMixture):
        return f"mixture(alpha={control.alpha:g})"
    return "control"


def check_compatible(control: Control, grid: TimeGrid) -> None:
    """Raise DomainError unless the control has one value per grid interval."""
    if control.intervals != grid.intervals:
        raise DomainError(
            f"control has {control.intervals} intervals, grid has {grid.intervals}"
        )


def solve_state(problem: Problem, control: Control, grid: TimeGrid) -> TrajectoryBundle:
    """
    Integrate x' = f(t, x, u) from x0 and evaluate the cost.

    For a mixture the field is (1 - alpha) f(t, x, base) + alpha f(t, x, probe)
    and the running cost is blended the same way. The cost uses interval-wise
    Simpson on the interval's stage values.

    Args:
        problem: The control problem.
        control: Plain control or two-point mixture on the grid.
        grid: Time grid.

    Returns:
        TrajectoryBundle: State, cost and provenance.

    Raises:
        DomainError: If the control does not match the grid.
        DivergenceError: If the state stops being finite.
    """
    check_compatible(control, grid)
    base, probe, alpha = _parts(control)

    def field(t: float, y: FloatArray, k: int) -> FloatArray:
        at_base = problem.dynamics(t, y, base.payload(k))
        if alpha == 0.0:
            return np.asarray(at_base, dtype=float)
        return np.asarray(blend(alpha, at_base, problem.dynamics(t, y, probe.payload(k))), dtype=float)

    x = integrate(field, problem.x0, grid, label="state")

    def cost(t: float, y: FloatArray, k: int) -> float:
        at_base = float(problem.running_cost(t, y, base.payload(k)))
        if alpha == 0.0:
            return at_base
        return float(blend(alpha, at_base, float(problem.running_cost(t, y, probe.payload(k)))))

    nodes, mids = grid.nodes, grid.midpoints
    assert x.midpoints is not None
    left = np.array([cost(nodes[k], x.values[k], k) for k in range(grid.intervals)])
    mid = np.array([cost(mids[k], x.midpoints[k], k) for k in range(grid.intervals)])
    right = np.array([cost(nodes[k + 1], x.values[k + 1], k) for k in range(grid.intervals)])
    if not (np.all(np.isfinite(left)) and np.all(np.isfinite(mid)) and np.all(np.isfinite(right))):
        raise EvaluationError("running_cost", "non-finite output along the trajectory")
    j = quad_intervals(left, mid, right, grid)

    desc = describe(control)
    logger.debug(f"solved {problem.name} state for {desc}: J = {j:.10g}")
    return TrajectoryBundle(x=x, j=j, control_desc=desc, control=control)


@dataclass
class AprioriReport:
    """Observed state size and time-Lipschitz ratio against the a priori bounds."""

    max_norm: float
    norm_bound: float
    max_slope: float
    slope_bound: float

    @property
    def passed(self) -> bool:
        return self.max_norm <= self.norm_bound and self.max_slope <= self.slope_bound

    def to_dict(self) -> dict[str, Any]:
        return {
            "max_norm": self.max_norm,
            "norm_bound": self.norm_bound,
            "max_slope": self.max_slope,
            "slope_bound": self.slope_bound,
            "passed": self.passed,
        }


def a_priori_check(problem: Problem, bundle: TrajectoryBundle) -> AprioriReport:
    """
    Compare a trajectory with |x(t)| <= (|x0| + LT) e^{LT} and its Lipschitz-in-time bound.

    Args:
        problem: Problem providing x0, L and T.
        bundle: Solved trajectory.

    Returns:
        AprioriReport: Observed values and bounds.
    """
    values = bundle.x.values
    h = bundle.x.grid.step
    norms = np.linalg.norm(values.reshape(values.shape[0], -1), axis=1)
    slopes = np.linalg.norm(np.diff(values, axis=0).reshape(values.shape[0] - 1, -1), axis=1) / h
    report = AprioriReport(
        max_norm=float(norms.max()),
        norm_bound=problem.reachability_bound(),
        max_slope=float(slopes.max(initial=0.0)),
        slope_bound=problem.trajectory_lipschitz_bound(),
    )
    if not report.passed:
        logger.warning(f"a priori bounds exceeded for {problem.name}: {report.to_dict()}")
    return report
