"""
Built-in example problems.

P1 and P2 are the scalar integrator with a negative and a positive square
cost; the zero control is Pontryagin-singular for both but optimal only for P2.
P3 is the scalar linear-quadratic regulator whose Riccati solution is
P(t) = tanh(T - t).
"""

import math
from collections.abc import Callable
from functools import cache

import numpy as np

from ..errors import ConfigError
from ..ode.grid import TimeGrid
from ..ode.integrate import rk4_step
from ..utils.logging_config import get_logger
from .models import ControlDomain, FloatArray, PiecewiseControl, Problem

logger = get_logger(__name__)

BUILTIN_NAMES: dict[str, str] = {
    "P1": "integrator-neg-square",
    "P2": "integrator-pos-square",
    "P3": "scalar-LQ",
}

_ZERO = np.zeros((1, 1))


def _absolute(a: float, b: float) -> float:
    return abs(a - b)


@cache
def integrator_domain() -> ControlDomain:
    """The five-point domain shared by P1 and P2."""
    return ControlDomain.from_metric([-1.0, -0.5, 0.0, 0.5, 1.0], _absolute)


@cache
def interval_domain(samples: int) -> ControlDomain:
    """Uniform samples of [-2, 2] used by P3."""
    if samples < 2:
        raise ConfigError(f"domain_samples must be at least 2, got {samples}")
    points = [float(v) for v in np.linspace(-2.0, 2.0, samples)]
    return ControlDomain.from_metric(points, _absolute, [f"{p:g}" for p in points])


def _integrator(name: str, sign: float) -> Problem:
    return Problem(
        name=name,
        horizon=1.0,
        x0=np.zeros(1),
        dynamics=lambda t, x, u: np.array([u]),
        running_cost=lambda t, x, u: sign * float(x[0]) ** 2,
        jacobian=lambda t, x, u: _ZERO,
        cost_gradient=lambda t, x, u: np.array([2.0 * sign * x[0]]),
        hessians=lambda t, x, u: [np.array([[2.0 * sign]]), _ZERO],
        lipschitz=10.0,
        modulus=lambda r: r,
        state_box=5.0,
    )


def _scalar_lq() -> Problem:
    return Problem(
        name=BUILTIN_NAMES["P3"],
        horizon=1.0,
        x0=np.ones(1),
        dynamics=lambda t, x, u: np.array([u]),
        running_cost=lambda t, x, u: float(x[0]) ** 2 + u**2,
        jacobian=lambda t, x, u: _ZERO,
        cost_gradient=lambda t, x, u: np.array([2.0 * x[0]]),
        hessians=lambda t, x, u: [np.array([[2.0]]), _ZERO],
        lipschitz=10.0,
        # |(x^2 + u^2, u) - (x^2 + v^2, v)| <= sqrt(17) |u - v| for |u|, |v| <= 2
        modulus=lambda r: math.sqrt(17.0) * r,
        state_box=5.0,
    )


def riccati_candidate(problem: Problem, domain: ControlDomain, grid: TimeGrid) -> PiecewiseControl:
    """
    Sample-and-hold Riccati feedback u = -tanh(T - t) x snapped to the domain.

    The feedback is evaluated at each interval midpoint using a half-step
    prediction of the state, then snapped to the nearest sample (lowest index
    on ties) and held while the state is advanced by one RK4 step.

    Args:
        problem: The scalar LQ problem.
        domain: Sampled control interval.
        grid: Control grid.

    Returns:
        PiecewiseControl: The discretized feedback control.
    """
    samples = np.asarray(domain.points, dtype=float)
    horizon = problem.horizon
    h = grid.step
    x: FloatArray = problem.x0.copy()
    values = np.empty(grid.intervals, dtype=np.int64)
    for k in range(grid.intervals):
        t = float(grid.nodes[k])
        predicted = -math.tanh(horizon - t) * float(x[0])
        x_mid = x + 0.5 * h * problem.dynamics(t, x, predicted)
        target = -math.tanh(horizon - float(grid.midpoints[k])) * float(x_mid[0])
        index = int(np.argmin(np.abs(samples - target)))
        values[k] = index
        payload = domain.points[index]
        x, _ = rk4_step(lambda s, y, _k, u=payload: problem.dynamics(s, y, u), t, x, h, k)
    return PiecewiseControl(domain, values)


def builtin_problem(
    problem_id: str, grid_n: int = 1000, domain_samples: int = 401
) -> tuple[Problem, ControlDomain, PiecewiseControl]:
    """
    Look up a registered problem with its domain and candidate control.

    Args:
        problem_id: One of "P1", "P2", "P3".
        grid_n: Number of control intervals.
        domain_samples: Number of domain samples (P3 only).

    Returns:
        tuple: (problem, domain, candidate).

    Raises:
        ConfigError: For an unknown id.
    """
    builders: dict[str, Callable[[], tuple[Problem, ControlDomain, PiecewiseControl]]] = {
        "P1": lambda: _zero_candidate(_integrator(BUILTIN_NAMES["P1"], -1.0), grid_n),
        "P2": lambda: _zero_candidate(_integrator(BUILTIN_NAMES["P2"], 1.0), grid_n),
        "P3": lambda: _lq_candidate(grid_n, domain_samples),
    }
    if problem_id not in builders:
        raise ConfigError(f"unknown problem id '{problem_id}' (known: {', '.join(builders)})")
    problem, domain, candidate = builders[problem_id]()
    logger.debug(f"built {problem_id} ({problem.name}) on {grid_n} intervals, |U| = {domain.size}")
    return problem, domain, candidate


def _zero_candidate(problem: Problem, grid_n: int) -> tuple[Problem, ControlDomain, PiecewiseControl]:
    domain = integrator_domain()
    zero = domain.points.index(0.0)
    return problem, domain, PiecewiseControl.constant(domain, zero, grid_n)


def _lq_candidate(grid_n: int, domain_samples: int) -> tuple[Problem, ControlDomain, PiecewiseControl]:
    problem = _scalar_lq()
    domain = interval_domain(domain_samples)
    grid = TimeGrid(problem.horizon, grid_n)
    return problem, domain, riccati_candidate(problem, domain, grid)
