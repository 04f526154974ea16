"""
Data models for control problems.

This module defines the control domain (a finite sampled metric space), the
problem tuple with its analytic derivatives and regularity constants, and the
two control representations used everywhere else: piecewise-constant controls
and two-point relaxed mixtures.
"""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

from ..errors import DomainError, EvaluationError

FloatArray = npt.NDArray[np.float64]
DomainPoint = Any

VectorField = Callable[[float, FloatArray, DomainPoint], FloatArray]
ScalarField = Callable[[float, FloatArray, DomainPoint], float]
HessianField = Callable[[float, FloatArray, DomainPoint], Sequence[FloatArray]]
Modulus = Callable[[float], float]


@dataclass(frozen=True, eq=False)
class ControlDomain:
    """
    Finite sampled metric space standing in for the control set U.

    Attributes:
        points: Opaque payloads handed to the problem callables.
        distance: Symmetric matrix of pairwise distances rho(u_i, u_j).
        labels: Display strings, one per point.
    """

    points: tuple[DomainPoint, ...]
    distance: FloatArray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise DomainError("control domain must contain at least one point")
        size = len(self.points)
        if self.distance.shape != (size, size):
            raise DomainError(f"distance matrix shape {self.distance.shape} != ({size}, {size})")
        if len(self.labels) != size:
            raise DomainError("one label per domain point is required")
        self.distance.setflags(write=False)

    @classmethod
    def from_metric(
        cls,
        points: Sequence[DomainPoint],
        metric: Callable[[DomainPoint, DomainPoint], float],
        labels: Sequence[str] | None = None,
    ) -> "ControlDomain":
        """
        Build a domain by evaluating a metric on every pair of points.

        Args:
            points: Domain point payloads.
            metric: Distance function rho(a, b).
            labels: Optional display strings, defaults to str(point).

        Returns:
            ControlDomain: The sampled metric space.
        """
        size = len(points)
        distance = np.zeros((size, size))
        for i in range(size):
            for j in range(i + 1, size):
                distance[i, j] = distance[j, i] = float(metric(points[i], points[j]))
        if labels is None:
            labels = [str(p) for p in points]
        return cls(tuple(points), distance, tuple(labels))

    @property
    def size(self) -> int:
        return len(self.points)

    def check_index(self, index: int) -> None:
        if not 0 <= index < self.size:
            raise DomainError(f"domain index {index} out of range [0, {self.size})")


def domain_distance(domain: ControlDomain, i: int, j: int) -> float:
    """
    Return rho(u_i, u_j).

    Raises:
        DomainError: If either index is out of range.
    """
    domain.check_index(i)
    domain.check_index(j)
    return float(domain.distance[i, j])


def check_metric_axioms(domain: ControlDomain, tol: float = 1e-12) -> list[tuple[int, int, int]]:
    """
    List sampled triples violating a metric axiom.

    Zero diagonal and symmetry violations are reported as (i, j, j); triangle
    violations d(i, j) > d(i, k) + d(k, j) as (i, j, k).

    Args:
        domain: Domain to check.
        tol: Absolute slack for floating point comparisons.

    Returns:
        list: Offending index triples, empty when the axioms hold.
    """
    d = domain.distance
    bad: list[tuple[int, int, int]] = []
    for i in np.flatnonzero(np.abs(np.diag(d)) > tol):
        bad.append((int(i), int(i), int(i)))
    for i, j in zip(*np.nonzero(np.abs(d - d.T) > tol), strict=True):
        bad.append((int(i), int(j), int(j)))
    if (d < -tol).any():
        for i, j in zip(*np.nonzero(d < -tol), strict=True):
            bad.append((int(i), int(j), int(j)))
    for k in range(domain.size):
        via_k = d[:, k][:, None] + d[k, :][None, :]
        for i, j in zip(*np.nonzero(d > via_k + tol), strict=True):
            bad.append((int(i), int(j), k))
    return bad


@dataclass(frozen=True, eq=False)
class DynamicsEval:
    """Dynamics, cost and their state derivatives evaluated at one (t, x, u)."""

    f: FloatArray
    f0: float
    jacobian: FloatArray
    grad0: FloatArray
    hessians: tuple[FloatArray, ...]


@dataclass(frozen=True, eq=False)
class Problem:
    """
    One optimal control problem: minimize the integral of f0 subject to x' = f.

    The Jacobian is the plain matrix df/dx (rows are components of f). The
    hessians callable returns n + 1 matrices, index 0 for f0 and index k for
    the k-th component of f.

    Attributes:
        name: Registry name or free-form identifier.
        horizon: Final time T.
        x0: Initial state.
        dynamics: f(t, x, u) -> R^n.
        running_cost: f0(t, x, u) -> R.
        jacobian: df/dx(t, x, u) -> R^{n x n}.
        cost_gradient: grad_x f0(t, x, u) -> R^n.
        hessians: (t, x, u) -> [f0_xx, f1_xx, ..., fn_xx].
        lipschitz: Declared constant L.
        modulus: Declared modulus of continuity omega, or None for the linear default.
        state_box: Half-width of the state box used by regularity audits.
    """

    name: str
    horizon: float
    x0: FloatArray
    dynamics: VectorField
    running_cost: ScalarField
    jacobian: VectorField
    cost_gradient: VectorField
    hessians: HessianField
    lipschitz: float
    modulus: Modulus | None = None
    state_box: float | None = None

    def __post_init__(self) -> None:
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        object.__setattr__(self, "x0", x0)
        if not self.horizon > 0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if not self.lipschitz > 0:
            raise DomainError(f"lipschitz constant must be positive, got {self.lipschitz}")
        if x0.ndim != 1 or not np.all(np.isfinite(x0)):
            raise DomainError("x0 must be a finite vector")

    @property
    def dim(self) -> int:
        return int(self.x0.shape[0])

    def reachability_bound(self) -> float:
        """A priori bound (|x0| + LT) e^{LT} on every relaxed trajectory."""
        lt = self.lipschitz * self.horizon
        return (float(np.linalg.norm(self.x0)) + lt) * math.exp(lt)

    def trajectory_lipschitz_bound(self) -> float:
        """Lipschitz-in-time bound L (1 + reachability bound) on trajectories."""
        return self.lipschitz * (1.0 + self.reachability_bound())

    def effective_state_box(self) -> float:
        return self.state_box if self.state_box is not None else self.reachability_bound()


def _finite(component: str, value: Any) -> Any:
    if not np.all(np.isfinite(value)):
        raise EvaluationError(component, "non-finite output")
    return value


def eval_stack(problem: Problem, t: float, x: FloatArray, u: DomainPoint) -> DynamicsEval:
    """
    Evaluate dynamics, cost and derivatives once at (t, x, u).

    Args:
        problem: Problem to evaluate.
        t: Time in [0, T].
        x: State vector.
        u: Domain point payload.

    Returns:
        DynamicsEval: The evaluated bundle.

    Raises:
        EvaluationError: Naming the first component that is not finite.
    """
    n = problem.dim
    x = np.asarray(x, dtype=float)
    f = _finite("dynamics", np.asarray(problem.dynamics(t, x, u), dtype=float).reshape(n))
    f0 = float(_finite("running_cost", float(problem.running_cost(t, x, u))))
    jac = _finite("jacobian", np.asarray(problem.jacobian(t, x, u), dtype=float).reshape(n, n))
    grad0 = _finite(
        "cost_gradient", np.asarray(problem.cost_gradient(t, x, u), dtype=float).reshape(n)
    )
    raw = problem.hessians(t, x, u)
    if len(raw) != n + 1:
        raise EvaluationError("hessians", f"expected {n + 1} matrices, got {len(raw)}")
    hessians = tuple(
        _finite(f"hessians[{k}]", np.asarray(m, dtype=float).reshape(n, n))
        for k, m in enumerate(raw)
    )
    return DynamicsEval(f, f0, jac, grad0, hessians)


@dataclass(frozen=True, eq=False)
class PiecewiseControl:
    """
    Control holding one domain point per uniform grid interval.

    Attributes:
        domain: Domain the indices refer to.
        values: Domain indices, one per interval.
    """

    domain: ControlDomain
    values: npt.NDArray[np.int64]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.int64).reshape(-1)
        if values.size == 0:
            raise DomainError("a control needs at least one interval")
        if values.min() < 0 or values.max() >= self.domain.size:
            raise DomainError("control index outside the domain")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, domain: ControlDomain, index: int, intervals: int) -> "PiecewiseControl":
        domain.check_index(index)
        return cls(domain, np.full(intervals, index, dtype=np.int64))

    @property
    def intervals(self) -> int:
        return int(self.values.shape[0])

    def payload(self, k: int) -> DomainPoint:
        """Domain point active on interval k."""
        return self.domain.points[int(self.values[k])]

    def node_index(self, k: int) -> int:
        """Domain index at node k (right-continuous, last node uses the last interval)."""
        return int(self.values[min(k, self.intervals - 1)])

    def node_indices(self) -> npt.NDArray[np.int64]:
        """Domain index at every node 0..N."""
        return np.append(self.values, self.values[-1])

    def same_as(self, other: "PiecewiseControl") -> bool:
        return self.domain is other.domain and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class RelaxedMixture:
    """
    Two-point relaxed control (1 - alpha) delta_base + alpha delta_probe.

    Attributes:
        base: Candidate control.
        probe: Comparison control.
        alpha: Weight of the probe in [0, 1].
    """

    base: PiecewiseControl
    probe: PiecewiseControl
    alpha: float = field(default=0.0)

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"mixture weight {self.alpha} outside [0, 1]")
        if self.base.domain is not self.probe.domain:
            raise DomainError("mixture controls must share one domain")
        if self.base.intervals != self.probe.intervals:
            raise DomainError("mixture controls must share one grid")

    @property
    def intervals(self) -> int:
        return self.base.intervals


def blend(alpha: float, at_base: Any, at_probe: Any) -> Any:
    """Mixture action (1 - alpha) g(base) + alpha g(probe)."""
    if alpha == 0.0:
        return at_base
    if alpha == 1.0:
        return at_probe
    return (1.0 - alpha) * at_base + alpha * at_probe
