"""
Difference quotients of mixture trajectories and their a priori bounds.

X^alpha = (x^alpha - x_bar) / alpha and Y^alpha = (X^alpha - X) / alpha converge
to the first and second variations as alpha -> 0. Both are bounded by
running integrals of Theta(t) = omega(rho(u(t), u_bar(t))) and its square,
with constants that do not depend on alpha.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import DomainError, InconsistencyError
from ..ode.grid import GridFunction
from ..problems.models import FloatArray, Modulus, PiecewiseControl, RelaxedMixture
from ..trajectories.adjoint import Candidate
from ..trajectories.state import solve_state
from ..trajectories.variational import solve_second_variational, solve_variational
from ..utils.logging_config import get_logger
from .chattering import ConvergenceReport, add_orders

logger = get_logger(__name__)

ZERO_FLOOR = 1e-10
SPREAD_FLOOR = 1e-8
SPREAD_LIMIT = 2.0


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"difference quotients need alpha in (0, 1], got {alpha}")


def difference_quotient_X(candidate: Candidate, u: PiecewiseControl, alpha: float) -> GridFunction:  # noqa: N802
    """
    (x^alpha - x_bar) / alpha for the mixture (1 - alpha) delta_u_bar + alpha delta_u.

    Raises:
        DomainError: If alpha is not in (0, 1].
    """
    _check_alpha(alpha)
    mixed = solve_state(candidate.problem, RelaxedMixture(candidate.control, u, alpha), candidate.grid)
    return mixed.x.combine(candidate.x, 1.0 / alpha, -1.0 / alpha)


def difference_quotient_Y(  # noqa: N802
    candidate: Candidate,
    u: PiecewiseControl,
    alpha: float,
    X: GridFunction,  # noqa: N803
) -> GridFunction:
    """
    (X^alpha - X) / alpha, X being the first variation in the direction of u.

    Raises:
        DomainError: If alpha is not in (0, 1].
    """
    x_alpha = difference_quotient_X(candidate, u, alpha)
    return x_alpha.combine(X, 1.0 / alpha, -1.0 / alpha)


def quotient_convergence(
    candidate: Candidate, u: PiecewiseControl, alpha_list: Sequence[float]
) -> ConvergenceReport:
    """
    Sup-norm distance of X^alpha to X and of Y^alpha to Y for decreasing alpha.

    Rows carry "error" (first quotient), "second_error" and their empirical orders.
    """
    X = solve_variational(candidate, u)  # noqa: N806
    Y = solve_second_variational(candidate, u, X)  # noqa: N806
    rows: list[dict[str, Any]] = []
    for alpha in alpha_list:
        x_alpha = difference_quotient_X(candidate, u, alpha)
        y_alpha = x_alpha.combine(X, 1.0 / alpha, -1.0 / alpha)
        rows.append(
            {
                "alpha": alpha,
                "error": x_alpha.sup_distance(X),
                "second_error": y_alpha.sup_distance(Y),
            }
        )
    add_orders(rows, "alpha", ("error", "second_error"))
    logger.info(f"quotient convergence on {candidate.problem.name}: {len(rows)} alpha values")
    return ConvergenceReport("alpha", rows)


@dataclass(frozen=True, eq=False)
class ThetaSeries:
    """
    Theta(t) = omega(rho(u(t), u_bar(t))) at every node.

    Attributes:
        theta: Node series, right-continuous in the control.
    """

    theta: GridFunction

    def running(self, power: int = 1) -> FloatArray:
        """Exact running integral of Theta**power (piecewise constant per interval)."""
        grid = self.theta.grid
        pieces = grid.step * self.theta.values[:-1] ** power
        return np.concatenate(([0.0], np.cumsum(pieces)))

    def integral(self, power: int = 1) -> float:
        return float(self.running(power)[-1])


def theta_series(candidate: Candidate, u: PiecewiseControl, omega: Modulus) -> ThetaSeries:
    """Build Theta for u against the candidate control."""
    distance = candidate.control.domain.distance
    rho = distance[u.node_indices(), candidate.control.node_indices()]
    values = np.array([float(omega(float(r))) if r > 0 else 0.0 for r in rho])
    return ThetaSeries(GridFunction(candidate.grid, values))


@dataclass
class BoundReport:
    """
    Smallest constants with |X^alpha(t)| <= C1 int_0^t Theta and |Y^alpha(t)| <= C2 int_0^t Theta^2.

    Attributes:
        rows: One dict per alpha (alpha = 0 is the variational limit) with c1 and c2.
        spread_c1: max / min of the C1 values above the noise floor.
        spread_c2: Same for C2.
    """

    rows: list[dict[str, float]] = field(default_factory=list)
    spread_c1: float = 1.0
    spread_c2: float = 1.0

    @property
    def bounded(self) -> bool:
        finite = all(np.isfinite(row["c1"]) and np.isfinite(row["c2"]) for row in self.rows)
        return finite and self.spread_c1 <= SPREAD_LIMIT and self.spread_c2 <= SPREAD_LIMIT

    def constants(self, name: str) -> list[float]:
        return [row[name] for row in self.rows]

    def to_dict(self) -> dict[str, Any]:
        return {
            "rows": [dict(row) for row in self.rows],
            "spread_c1": self.spread_c1,
            "spread_c2": self.spread_c2,
            "bounded": self.bounded,
        }


def _fit_constant(series: GridFunction, running: FloatArray, label: str) -> float:
    norms = np.linalg.norm(series.values.reshape(series.values.shape[0], -1), axis=1)
    covered = running > 0.0
    if np.any(norms[~covered] > ZERO_FLOOR):
        raise InconsistencyError(
            f"{label} is nonzero where the running integral of Theta vanishes; "
            "the modulus of continuity does not bound the dynamics"
        )
    if not covered.any():
        return 0.0
    return float(np.max(norms[covered] / running[covered]))


def _spread(values: list[float]) -> float:
    significant = [v for v in values if v > SPREAD_FLOOR]
    if not significant:
        return 1.0
    return max(significant) / min(significant)


def quotient_bounds(
    candidate: Candidate, u: PiecewiseControl, alpha_list: Sequence[float], omega: Modulus
) -> BoundReport:
    """
    Fit C1 and C2 for every alpha in alpha_list and alpha = 0.

    Args:
        candidate: Solved candidate.
        u: Probe control.
        alpha_list: Mixture weights in (0, 1]; zero entries are folded into the limit row.
        omega: Modulus of continuity used for Theta.

    Returns:
        BoundReport: Constants per alpha and their spread.

    Raises:
        InconsistencyError: If a quotient is nonzero where int Theta is zero.
    """
    theta = theta_series(candidate, u, omega)
    first = theta.running(1)
    second = theta.running(2)
    X = solve_variational(candidate, u)  # noqa: N806
    Y = solve_second_variational(candidate, u, X)  # noqa: N806

    report = BoundReport()
    report.rows.append(
        {"alpha": 0.0, "c1": _fit_constant(X, first, "X"), "c2": _fit_constant(Y, second, "Y")}
    )
    for alpha in sorted({a for a in alpha_list if a > 0.0}):
        x_alpha = difference_quotient_X(candidate, u, alpha)
        y_alpha = x_alpha.combine(X, 1.0 / alpha, -1.0 / alpha)
        report.rows.append(
            {
                "alpha": alpha,
                "c1": _fit_constant(x_alpha, first, "X^alpha"),
                "c2": _fit_constant(y_alpha, second, "Y^alpha"),
            }
        )
    report.spread_c1 = _spread(report.constants("c1"))
    report.spread_c2 = _spread(report.constants("c2"))
    logger.info(
        f"a priori quotient bounds on {candidate.problem.name}: "
        f"spread C1 {report.spread_c1:.3g}, spread C2 {report.spread_c2:.3g}"
    )
    return report
