"""
Chattering approximation of two-point mixtures.

The control u^{alpha,eps} follows the probe on the part of every period of
length eps where the fractional part of t / eps is below alpha, and the base
control elsewhere. As eps shrinks its trajectory and cost approach those of
the mixture (1 - alpha) delta_base + alpha delta_probe.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import DomainError, ResolutionError
from ..ode.grid import TimeGrid
from ..problems.models import PiecewiseControl, Problem, RelaxedMixture
from ..trajectories.state import solve_state
from ..utils.logging_config import get_logger
from ..utils.reports import write_rows_csv

logger = get_logger(__name__)

MIN_STEPS_PER_PERIOD = 10


@dataclass(frozen=True, eq=False)
class ChatterSpec:
    """
    Parameters of a chattering control.

    Attributes:
        alpha: Fraction of each period spent on the probe, in [0, 1].
        epsilon: Period length, in (0, T].
        base: Candidate control.
        probe: Comparison control.
    """

    alpha: float
    epsilon: float
    base: PiecewiseControl
    probe: PiecewiseControl

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"chattering weight {self.alpha} outside [0, 1]")
        if not self.epsilon > 0:
            raise DomainError(f"chattering period must be positive, got {self.epsilon}")
        if self.base.domain is not self.probe.domain or self.base.intervals != self.probe.intervals:
            raise DomainError("chattering controls must share one domain and grid")


def chattering(spec: ChatterSpec, grid: TimeGrid) -> PiecewiseControl:
    """
    Build u^{alpha,eps} on the grid.

    Interval k takes the probe value when frac(m_k / eps) < alpha, m_k being
    the interval midpoint, and the base value otherwise.

    Args:
        spec: Weight, period and the two controls.
        grid: Control grid.

    Returns:
        PiecewiseControl: The chattering control.

    Raises:
        DomainError: If eps exceeds T.
        ResolutionError: If the grid has fewer than 10 steps per period.
    """
    if spec.epsilon > grid.horizon:
        raise DomainError(f"chattering period {spec.epsilon} exceeds the horizon {grid.horizon}")
    if grid.step > spec.epsilon / MIN_STEPS_PER_PERIOD:
        raise ResolutionError(
            f"grid step {grid.step:.3g} cannot resolve period {spec.epsilon:.3g} "
            f"(needs h <= eps/{MIN_STEPS_PER_PERIOD})"
        )
    if spec.alpha == 0.0:
        return spec.base
    if spec.alpha == 1.0:
        return spec.probe
    phase = np.mod(grid.midpoints / spec.epsilon, 1.0)
    on_probe = phase < spec.alpha
    values = np.where(on_probe, spec.probe.values, spec.base.values)
    return PiecewiseControl(spec.base.domain, values)


@dataclass
class ConvergenceReport:
    """
    Errors against a limit for a decreasing sequence of parameters.

    Attributes:
        parameter: Name of the swept parameter ("epsilon", "alpha").
        rows: One dict per parameter value with its error columns and the
            empirical order against the previous row.
    """

    parameter: str
    rows: list[dict[str, Any]] = field(default_factory=list)

    def errors(self, column: str = "error") -> list[float]:
        return [row[column] for row in self.rows]

    def orders(self, column: str = "error") -> list[float]:
        """Empirical orders log(e_prev / e) / log(p_prev / p) for consecutive rows."""
        return [row[f"{column}_order"] for row in self.rows[1:]]

    def to_dict(self) -> dict[str, Any]:
        return {"parameter": self.parameter, "rows": [dict(row) for row in self.rows]}

    def to_csv(self, path: str | Path) -> Path:
        columns = list(self.rows[0]) if self.rows else [self.parameter]
        return write_rows_csv(path, columns, ([row.get(c) for c in columns] for row in self.rows))


def empirical_order(prev_error: float, error: float, prev_param: float, param: float) -> float:
    """log(e_prev / e) / log(p_prev / p), NaN when either error vanishes."""
    if prev_error <= 0.0 or error <= 0.0 or prev_param == param:
        return math.nan
    return math.log(prev_error / error) / math.log(prev_param / param)


def add_orders(rows: list[dict[str, Any]], parameter: str, columns: tuple[str, ...]) -> None:
    """Fill the "<column>_order" entries of consecutive rows in place."""
    for prev, row in zip(rows, rows[1:], strict=False):
        for column in columns:
            row[f"{column}_order"] = empirical_order(
                prev[column], row[column], prev[parameter], row[parameter]
            )
    if rows:
        for column in columns:
            rows[0][f"{column}_order"] = math.nan


def chattering_convergence(
    problem: Problem,
    base: PiecewiseControl,
    probe: PiecewiseControl,
    alpha: float,
    eps_list: list[float],
    grid: TimeGrid,
) -> ConvergenceReport:
    """
    Measure how chattering controls approach the mixture as eps shrinks.

    Each row holds e = max |x^{alpha,eps} - x^alpha| ("error"), the cost gap
    |J(u^{alpha,eps}) - J(sigma^alpha)| ("cost_error"), J(u^{alpha,eps}) and the
    empirical orders against the previous row.

    Args:
        problem: The control problem.
        base: Candidate control.
        probe: Comparison control.
        alpha: Mixture weight.
        eps_list: Decreasing periods, each resolvable on the grid.
        grid: Time grid.

    Returns:
        ConvergenceReport: One row per period.
    """
    if any(b >= a for a, b in zip(eps_list, eps_list[1:], strict=False)):
        raise DomainError("eps_list must be strictly decreasing")
    mixture = solve_state(problem, RelaxedMixture(base, probe, alpha), grid)
    rows: list[dict[str, Any]] = []
    for eps in eps_list:
        control = chattering(ChatterSpec(alpha, eps, base, probe), grid)
        chattered = solve_state(problem, control, grid)
        rows.append(
            {
                "epsilon": eps,
                "error": chattered.x.sup_distance(mixture.x),
                "cost_error": abs(chattered.j - mixture.j),
                "cost": chattered.j,
            }
        )
    add_orders(rows, "epsilon", ("error", "cost_error"))
    errors = ", ".join(f"{row['error']:.3e}" for row in rows)
    logger.info(f"chattering convergence on {problem.name} (alpha={alpha:g}): errors {errors}")
    return ConvergenceReport("epsilon", rows)
