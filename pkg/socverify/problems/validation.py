"""
Checks on user-supplied problem data.

validate_derivatives compares the analytic Jacobian, cost gradient and
Hessians with central finite differences. audit_regularity samples the state
box and the control domain to estimate the Lipschitz constant and the modulus
of continuity, flagging sampled violations of the declared ones.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import ConfigError
from ..utils.logging_config import get_logger
from .models import ControlDomain, DomainPoint, DynamicsEval, FloatArray, Modulus, Problem, eval_stack

logger = get_logger(__name__)

Sample = tuple[float, FloatArray, DomainPoint]


@dataclass
class ValidationReport:
    """
    Finite-difference comparison of the analytic derivatives.

    Attributes:
        step: Difference step h.
        tolerance: Relative tolerance tol_fd.
        max_errors: Largest relative error per component.
        flagged: Indices of samples with an error above tolerance.
    """

    step: float
    tolerance: float
    max_errors: dict[str, float] = field(default_factory=dict)
    flagged: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.flagged

    def to_dict(self) -> dict[str, Any]:
        return {
            "step": self.step,
            "tolerance": self.tolerance,
            "max_errors": dict(self.max_errors),
            "flagged": list(self.flagged),
            "passed": self.passed,
        }


def _relative_error(approx: FloatArray, exact: FloatArray) -> float:
    return float(np.max(np.abs(approx - exact) / (1.0 + np.abs(exact)), initial=0.0))


def validate_derivatives(
    problem: Problem, samples: Sequence[Sample], h: float = 1e-5, tol_fd: float = 1e-6
) -> ValidationReport:
    """
    Cross-check analytic derivatives with central differences in x.

    Jacobian and cost gradient come from differences of f and f0; the Hessians
    from differences of the analytic Jacobian rows and cost gradient.

    Args:
        problem: Problem whose callables are checked.
        samples: (t, x, payload) points.
        h: Difference step, positive.
        tol_fd: Relative tolerance on |fd - analytic| / (1 + |analytic|).

    Returns:
        ValidationReport: Largest errors and flagged samples.
    """
    if not h > 0:
        raise ConfigError(f"difference step must be positive, got {h}")
    n = problem.dim
    report = ValidationReport(step=h, tolerance=tol_fd)
    worst = {"jacobian": 0.0, "cost_gradient": 0.0, "hessians": 0.0}

    for index, (t, x, u) in enumerate(samples):
        x = np.asarray(x, dtype=float)
        exact = eval_stack(problem, t, x, u)
        jac_fd = np.empty((n, n))
        grad_fd = np.empty(n)
        hess_fd = np.empty((n + 1, n, n))
        for i in range(n):
            shift = np.zeros(n)
            shift[i] = h
            plus = eval_stack(problem, t, x + shift, u)
            minus = eval_stack(problem, t, x - shift, u)
            jac_fd[:, i] = (plus.f - minus.f) / (2.0 * h)
            grad_fd[i] = (plus.f0 - minus.f0) / (2.0 * h)
            hess_fd[0, :, i] = (plus.grad0 - minus.grad0) / (2.0 * h)
            hess_fd[1:, :, i] = (plus.jacobian - minus.jacobian) / (2.0 * h)

        errors = {
            "jacobian": _relative_error(jac_fd, exact.jacobian),
            "cost_gradient": _relative_error(grad_fd, exact.grad0),
            "hessians": _relative_error(hess_fd, np.stack(exact.hessians)),
        }
        for name, value in errors.items():
            worst[name] = max(worst[name], value)
        if max(errors.values()) > tol_fd:
            report.flagged.append(index)
            logger.warning(f"derivative mismatch at sample {index} (t={t:.4g}): {errors}")

    report.max_errors = worst
    logger.info(
        f"derivative validation on {len(samples)} samples: max errors {worst}, "
        f"{len(report.flagged)} flagged"
    )
    return report


def default_samples(problem: Problem, domain: ControlDomain, count: int, seed: int) -> list[Sample]:
    """
    Seeded (t, x, u) samples on [0, T] x state box x U.

    Args:
        problem: Problem providing T, n and the state box.
        domain: Control domain.
        count: Number of samples.
        seed: Generator seed.

    Returns:
        list: The samples.
    """
    rng = np.random.default_rng(seed)
    box = problem.effective_state_box()
    times = rng.uniform(0.0, problem.horizon, count)
    states = rng.uniform(-box, box, (count, problem.dim))
    indices = rng.integers(0, domain.size, count)
    return [
        (float(t), states[i], domain.points[int(indices[i])]) for i, t in enumerate(times)
    ]


@dataclass
class RegularityReport:
    """
    Empirical regularity constants and sampled violations.

    Attributes:
        samples: Number of sampled pairs.
        state_box: Half-width of the sampled state box.
        declared_lipschitz: The problem's L.
        empirical_lipschitz: Largest |F(x) - F(x')| / |x - x'| for F = (f0, f).
        empirical_growth: Largest |F(t, 0, u)|.
        empirical_jacobian_lipschitz: Largest ratio for F_x = (grad f0, df/dx).
        omega_constant: Largest |F(u) - F(u')| / rho(u, u') over F and F_x.
        hessian_omega_constant: Largest Hessian increment over |x - x'| + rho.
        modulus_declared: Whether the problem declared omega.
        violations: Sampled violations with kind, sample index, lhs and rhs.
    """

    samples: int
    state_box: float
    declared_lipschitz: float
    empirical_lipschitz: float = 0.0
    empirical_growth: float = 0.0
    empirical_jacobian_lipschitz: float = 0.0
    omega_constant: float = 0.0
    hessian_omega_constant: float = 0.0
    modulus_declared: bool = True
    violations: list[dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "samples": self.samples,
            "state_box": self.state_box,
            "declared_lipschitz": self.declared_lipschitz,
            "empirical_lipschitz": self.empirical_lipschitz,
            "empirical_growth": self.empirical_growth,
            "empirical_jacobian_lipschitz": self.empirical_jacobian_lipschitz,
            "omega_constant": self.omega_constant,
            "hessian_omega_constant": self.hessian_omega_constant,
            "modulus": "declared" if self.modulus_declared else "linear default",
            "violations": list(self.violations),
            "passed": self.passed,
        }


def _full(e: DynamicsEval) -> FloatArray:
    return np.concatenate(([e.f0], e.f))


def _full_x(e: DynamicsEval) -> FloatArray:
    return np.vstack((e.grad0, e.jacobian))


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def audit_regularity(
    problem: Problem,
    domain: ControlDomain,
    sample_count: int,
    seed: int,
    state_box: float | None = None,
) -> RegularityReport:
    """
    Sample the Lipschitz and modulus-of-continuity assumptions.

    Each sample draws t, two states x, x' in the box and two domain points
    u, u'; F = (f0, f) and F_x = (grad f0, df/dx) are compared against L and
    omega, and the Hessians against omega(|x - x'| + rho(u, u')).

    Args:
        problem: Problem to audit.
        domain: Control domain providing rho.
        sample_count: Number of sample pairs, at least 2.
        seed: Generator seed.
        state_box: Half-width of the state box; defaults to the problem's.

    Returns:
        RegularityReport: Constants and violations (never raises on findings).
    """
    if sample_count < 2:
        raise ConfigError(f"sample_count must be at least 2, got {sample_count}")
    box = state_box if state_box is not None else problem.effective_state_box()
    rng = np.random.default_rng(seed)
    n = problem.dim
    lip = problem.lipschitz
    omega = problem.modulus
    report = RegularityReport(
        samples=sample_count,
        state_box=box,
        declared_lipschitz=lip,
        modulus_declared=omega is not None,
    )
    zero = np.zeros(n)

    def flag(kind: str, index: int, lhs: float, rhs: float) -> None:
        if lhs > rhs * (1.0 + 1e-9) + 1e-12:
            report.violations.append({"kind": kind, "sample": index, "lhs": lhs, "rhs": rhs})

    for index in range(sample_count):
        t = float(rng.uniform(0.0, problem.horizon))
        x = rng.uniform(-box, box, n)
        x_hat = rng.uniform(-box, box, n)
        i, j = (int(v) for v in rng.integers(0, domain.size, 2))
        u, u_hat = domain.points[i], domain.points[j]
        rho = float(domain.distance[i, j])
        dx = float(np.linalg.norm(x - x_hat))

        at_x = eval_stack(problem, t, x, u)
        at_x_hat = eval_stack(problem, t, x_hat, u)
        at_u_hat = eval_stack(problem, t, x, u_hat)
        at_both = eval_stack(problem, t, x_hat, u_hat)
        at_zero = eval_stack(problem, t, zero, u)

        d_state = float(np.linalg.norm(_full(at_x) - _full(at_x_hat)))
        growth = float(np.linalg.norm(_full(at_zero)))
        d_jac = float(np.linalg.norm(_full_x(at_x) - _full_x(at_x_hat)))
        d_control = float(np.linalg.norm(_full(at_x) - _full(at_u_hat)))
        d_control_jac = float(np.linalg.norm(_full_x(at_x) - _full_x(at_u_hat)))
        d_hessian = max(
            float(np.linalg.norm(a - b))
            for a, b in zip(at_x.hessians, at_both.hessians, strict=True)
        )

        report.empirical_lipschitz = max(report.empirical_lipschitz, _ratio(d_state, dx))
        report.empirical_growth = max(report.empirical_growth, growth)
        report.empirical_jacobian_lipschitz = max(
            report.empirical_jacobian_lipschitz, _ratio(d_jac, dx)
        )
        report.omega_constant = max(
            report.omega_constant, _ratio(d_control, rho), _ratio(d_control_jac, rho)
        )
        report.hessian_omega_constant = max(
            report.hessian_omega_constant, _ratio(d_hessian, dx + rho)
        )

        flag("lipschitz", index, d_state, lip * dx)
        flag("growth", index, growth, lip)
        flag("jacobian_lipschitz", index, d_jac, lip * dx)
        if omega is not None:
            flag("modulus", index, d_control, omega(rho))
            flag("modulus_jacobian", index, d_control_jac, omega(rho))
            flag("modulus_hessian", index, d_hessian, omega(dx + rho))

    logger.info(
        f"regularity audit of {problem.name}: L_hat={report.empirical_lipschitz:.4g}, "
        f"C_omega={report.omega_constant:.4g}, {len(report.violations)} violations"
    )
    return report


@dataclass(frozen=True)
class ModulusChoice:
    """The modulus used downstream and where it came from."""

    omega: Modulus
    declared: bool
    constant: float | None = None

    def describe(self) -> str:
        if self.declared:
            return "declared"
        return f"linear default omega(r) = {self.constant:.6g} r"


def resolve_modulus(
    problem: Problem, domain: ControlDomain, sample_count: int = 1000, seed: int = 0
) -> ModulusChoice:
    """
    Return the declared modulus, or r -> C_omega r with C_omega estimated by audit.

    Args:
        problem: Problem possibly declaring omega.
        domain: Control domain.
        sample_count: Audit samples for the estimate.
        seed: Audit seed.

    Returns:
        ModulusChoice: The modulus and its provenance.
    """
    if problem.modulus is not None:
        return ModulusChoice(problem.modulus, declared=True)
    audit = audit_regularity(problem, domain, sample_count, seed)
    constant = audit.omega_constant
    logger.info(f"{problem.name} declares no modulus; using linear default with C = {constant:.6g}")
    return ModulusChoice(lambda r: constant * r, declared=False, constant=constant)
