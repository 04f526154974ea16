"""
Batch pipeline behind the command-line front end.

A run solves the candidate once, checks the maximum condition and, only when
it holds, the second-order conditions. Every report lands under
{output_dir}/{problem_id}/ with a fixed layout; the timestamp and package
version are isolated in run_meta.json so the remaining files depend only on
the configuration.
"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from functools import cached_property
from pathlib import Path
from typing import Any

from ..ode.grid import GridFunction, TimeGrid
from ..pmp.hamiltonian import (
    HamiltonianTable,
    PmpReport,
    first_quotient_oracle,
    hamiltonian_table,
    pmp_residual,
)
from ..pmp.singular import SingularSet, is_singular, singular_set
from ..problems.library import builtin_problem
from ..problems.models import ControlDomain, PiecewiseControl, Problem, check_metric_axioms
from ..problems.validation import (
    ModulusChoice,
    audit_regularity,
    default_samples,
    resolve_modulus,
    validate_derivatives,
)
from ..relaxation.chattering import chattering_convergence
from ..relaxation.quotients import quotient_bounds, quotient_convergence
from ..soc.kernels import SocKernelContext
from ..soc.necessary import (
    necessary_Q,
    necessary_Q_via_variation,
    pointwise_test,
    second_quotient_oracle,
    trace_identity_check,
)
from ..soc.report import SocReport
from ..soc.sufficient import FamilyMember, FamilySpec, control_family, growth_check, sufficient_fit
from ..trajectories.adjoint import Candidate, analyze_candidate
from ..utils.logging_config import get_logger
from ..utils.reports import ensure_dir, write_json
from ..utils.version import get_version
from .config import RunConfig

UTC = timezone.utc  # datetime.UTC alias (Python 3.11+)

logger = get_logger(__name__)

COMMANDS = ("check", "pmp", "soc", "sufficient", "chatter", "quotients", "audit")

SERIES = ("x", "psi", "W", "Phi", "PhiInv", "pmp_residual", "singular_set")

# command -> stages, in execution order
STAGES: dict[str, tuple[str, ...]] = {
    "check": ("pmp", "soc", "sufficient"),
    "pmp": ("pmp",),
    "soc": ("pmp", "soc"),
    "sufficient": ("pmp", "sufficient"),
    "chatter": ("chatter",),
    "quotients": ("pmp", "quotients"),
    "audit": ("audit",),
}


@dataclass
class Verdict:
    """
    Outcome of one run.

    Attributes:
        problem_id: Built-in problem that was checked.
        command: Subcommand that produced the verdict.
        pmp: "pass" or "fail"; None when the maximum condition was not checked.
        soc_necessary: "pass" or "violated"; None when not checked.
        pointwise: "pass" or "violated"; None when not checked.
        sufficient: beta_hat over every member of the sampled family when positive,
            "not_established" otherwise; None when not run.
        sufficient_constants: beta_hat over the constant members alone; None when
            not run or when the family holds no constants.
        audit: "pass" or "fail" for the derivative and regularity audit.
        details: Headline numbers taken from the underlying reports.
        artifacts: Written files, relative to the problem directory.
    """

    problem_id: str
    command: str
    pmp: str | None = None
    soc_necessary: str | None = None
    pointwise: str | None = None
    sufficient: float | str | None = None
    sufficient_constants: float | None = None
    audit: str | None = None
    details: dict[str, Any] = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        """1 when a necessary condition (or the audit) failed, 0 otherwise."""
        failed = (
            self.pmp == "fail"
            or self.soc_necessary == "violated"
            or self.pointwise == "violated"
            or self.audit == "fail"
        )
        return 1 if failed else 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "problem": self.problem_id,
            "command": self.command,
            "pmp": self.pmp,
            "soc_necessary": self.soc_necessary,
            "pointwise": self.pointwise,
            "sufficient": self.sufficient,
            "sufficient_constants": self.sufficient_constants,
            "audit": self.audit,
            "details": dict(self.details),
            "artifacts": list(self.artifacts),
            "exit_code": self.exit_code,
        }


def _stages(config: RunConfig, command: str) -> tuple[str, ...]:
    stages = STAGES[command]
    if command == "check" and config.suites:
        stages = (*stages, "chatter", "quotients")
    return stages


def report_paths(config: RunConfig, command: str = "check") -> list[Path]:
    """
    Files a successful run of `command` writes, in a fixed order.

    Reports of gated stages (soc.json, the second-quotient oracle) appear here
    even though a failing maximum condition skips them.

    Args:
        config: Run configuration.
        command: Subcommand name.

    Returns:
        list: Absolute-or-relative paths under config.problem_dir.
    """
    root = config.problem_dir
    stages = _stages(config, command)
    paths = [root / "verdict.json", root / "run_meta.json"]
    if "pmp" in stages:
        paths.append(root / "pmp.json")
        paths.extend(root / "series" / f"{name}.csv" for name in SERIES)
    if "soc" in stages or "sufficient" in stages:
        paths.append(root / "soc.json")
    if "chatter" in stages:
        paths.extend([root / "convergence" / "chattering.json", root / "convergence" / "chattering.csv"])
    if "quotients" in stages:
        paths.extend(
            root / "convergence" / name
            for name in (
                "quotients.json",
                "quotients.csv",
                "first_oracle.json",
                "second_oracle.json",
                "bounds.json",
            )
        )
    if "audit" in stages:
        paths.append(root / "audit.json")
    return paths


class ReportWriter:
    """Writes reports under one problem directory and records what was written."""

    def __init__(self, root: Path) -> None:
        self.root = ensure_dir(root)
        self.artifacts: list[str] = []

    def _record(self, path: Path) -> Path:
        relative = path.relative_to(self.root).as_posix()
        if relative not in self.artifacts:
            self.artifacts.append(relative)
        return path

    def json(self, name: str, data: Any) -> Path:
        return self._record(write_json(self.root / name, data))

    def series(self, name: str, values: GridFunction) -> Path:
        return self._record(values.to_csv(self.root / "series" / f"{name}.csv", name))

    def csv(self, name: str, report: Any) -> Path:
        """Write any report exposing to_csv(path)."""
        return self._record(report.to_csv(self.root / name))


class RunState:
    """Objects shared by the stages of one run, each built on first use."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        problem, domain, control = builtin_problem(config.problem_id, config.grid_n, config.domain_samples)
        self.problem: Problem = problem
        self.domain: ControlDomain = domain
        self.control: PiecewiseControl = control
        self.grid = TimeGrid(problem.horizon, config.grid_n)
        self.pmp: PmpReport | None = None
        self.singular: SingularSet | None = None
        self.soc: SocReport | None = None

    @cached_property
    def candidate(self) -> Candidate:
        return analyze_candidate(self.problem, self.control, self.grid, self.config.tol_inv)

    @cached_property
    def table(self) -> HamiltonianTable:
        return hamiltonian_table(self.candidate)

    @cached_property
    def kernels(self) -> SocKernelContext:
        return SocKernelContext(self.candidate)

    @cached_property
    def probe(self) -> PiecewiseControl:
        index = self.config.probe if self.config.probe is not None else self.domain.size - 1
        self.domain.check_index(index)
        return PiecewiseControl.constant(self.domain, index, self.grid.intervals)

    @cached_property
    def modulus(self) -> ModulusChoice:
        return resolve_modulus(self.problem, self.domain, self.config.audit_samples, self.config.audit_seed)

    @cached_property
    def family(self) -> list[FamilyMember]:
        spec = FamilySpec(
            constants=self.config.family_constants,
            switches=self.config.family_switches,
            random=self.config.family_random,
            seed=self.config.seed,
        )
        return control_family(self.domain, self.grid, spec, base=self.control)

    @property
    def pmp_passed(self) -> bool:
        return self.pmp is not None and self.pmp.passed


def _pmp_stage(state: RunState, writer: ReportWriter, verdict: Verdict) -> None:
    cand = state.candidate
    state.pmp = pmp_residual(cand, state.config.eta_pmp, state.table)
    state.singular = singular_set(cand, state.config.eta_pmp, state.table)
    verdict.pmp = "pass" if state.pmp.passed else "fail"
    verdict.details["cost"] = cand.j
    verdict.details["max_pmp_residual"] = state.pmp.max_residual

    writer.json(
        "pmp.json",
        {
            "problem": state.problem.name,
            "cost": cand.j,
            "pmp": state.pmp.to_dict(),
            "singular_set": state.singular.to_dict(),
        },
    )
    for name in ("x", "psi", "W", "Phi", "PhiInv"):
        writer.series(name, getattr(cand, name))
    writer.series("pmp_residual", state.pmp.residual)
    writer.csv("series/singular_set.csv", state.singular)


def _soc_report(state: RunState) -> SocReport:
    if state.soc is None:
        state.soc = SocReport(eta_soc=state.config.eta_soc)
    return state.soc


def _soc_stage(state: RunState, writer: ReportWriter, verdict: Verdict) -> None:
    if not state.pmp_passed:
        logger.warning(f"maximum condition fails on {state.problem.name}; skipping second-order checks")
        return
    assert state.singular is not None
    ctx = state.kernels
    report = _soc_report(state)
    singular_members: list[FamilyMember] = []
    for member in state.family:
        inside, measure = is_singular(state.singular, member.control)
        if not inside:
            report.non_singular.append(member.label)
            continue
        singular_members.append(member)
        report.members.append(
            {
                "label": member.label,
                "kind": member.kind,
                "Q": necessary_Q(ctx, member.control),
                "Q_variation": necessary_Q_via_variation(ctx, member.control),
            }
        )
    report.pointwise = pointwise_test(ctx, state.singular, state.config.eta_soc)
    if report.worst is not None:
        worst = next(m for m in singular_members if m.label == report.worst)
        report.trace = trace_identity_check(ctx, worst.control)

    verdict.soc_necessary = report.verdict
    verdict.pointwise = report.pointwise_verdict
    verdict.details["Q"] = report.Q
    verdict.details["worst_member"] = report.worst
    logger.info(
        f"second-order necessary check on {state.problem.name}: Q = {report.Q:.6g} over "
        f"{len(report.members)} singular members, {report.verdict}"
    )
    writer.json("soc.json", report.to_dict())


def _sufficient_stage(state: RunState, writer: ReportWriter, verdict: Verdict) -> None:
    if not state.pmp_passed:
        logger.warning(f"maximum condition fails on {state.problem.name}; skipping the sufficient fit")
        return
    ctx = state.kernels
    report = _soc_report(state)
    omega = state.modulus.omega
    report.fit = sufficient_fit(ctx, state.family, omega)
    if report.fit.established:
        report.growth = growth_check(
            ctx, state.family, report.fit.beta_hat, state.config.eps0, omega, state.config.tol_growth
        )
        verdict.sufficient = report.fit.beta_hat
    else:
        verdict.sufficient = "not_established"
    verdict.sufficient_constants = report.fit.beta_hat_constants
    verdict.details["beta_hat"] = report.fit.beta_hat
    verdict.details["beta_hat_constants"] = report.fit.beta_hat_constants
    verdict.details["growth_failures"] = len(report.growth_failures)
    verdict.details["modulus"] = state.modulus.describe()
    writer.json("soc.json", report.to_dict())


def _chatter_stage(state: RunState, writer: ReportWriter, verdict: Verdict) -> None:
    report = chattering_convergence(
        state.problem,
        state.control,
        state.probe,
        state.config.chatter_alpha,
        list(state.config.eps_list),
        state.grid,
    )
    writer.json("convergence/chattering.json", report.to_dict())
    writer.csv("convergence/chattering.csv", report)
    verdict.details["chattering_errors"] = report.errors()


def _quotient_stage(state: RunState, writer: ReportWriter, verdict: Verdict) -> None:
    cand = state.candidate
    alphas = list(state.config.alpha_list)
    convergence = quotient_convergence(cand, state.probe, alphas)
    writer.json("convergence/quotients.json", convergence.to_dict())
    writer.csv("convergence/quotients.csv", convergence)
    writer.json("convergence/first_oracle.json", first_quotient_oracle(cand, state.probe, alphas).to_dict())
    if state.pmp_passed:
        second = second_quotient_oracle(state.kernels, state.probe, alphas, state.singular)
        writer.json("convergence/second_oracle.json", second.to_dict())
    bounds = quotient_bounds(cand, state.probe, alphas, state.modulus.omega)
    writer.json("convergence/bounds.json", bounds.to_dict())
    verdict.details["quotient_bounds_bounded"] = bounds.bounded


def _audit_stage(state: RunState, writer: ReportWriter, verdict: Verdict) -> None:
    config = state.config
    samples = default_samples(state.problem, state.domain, config.audit_samples, config.audit_seed)
    derivatives = validate_derivatives(state.problem, samples, tol_fd=config.tol_fd)
    regularity = audit_regularity(state.problem, state.domain, config.audit_samples, config.audit_seed)
    metric = check_metric_axioms(state.domain)
    passed = derivatives.passed and regularity.passed and not metric
    verdict.audit = "pass" if passed else "fail"
    writer.json(
        "audit.json",
        {
            "derivatives": derivatives.to_dict(),
            "regularity": regularity.to_dict(),
            "metric_violations": [list(triple) for triple in metric],
            "verdict": verdict.audit,
        },
    )


STAGE_RUNNERS = {
    "pmp": _pmp_stage,
    "soc": _soc_stage,
    "sufficient": _sufficient_stage,
    "chatter": _chatter_stage,
    "quotients": _quotient_stage,
    "audit": _audit_stage,
}


def run(config: RunConfig, command: str = "check") -> Verdict:
    """
    Execute the stages of a subcommand and write their reports.

    Args:
        config: Validated run configuration.
        command: One of COMMANDS.

    Returns:
        Verdict: Findings and the written artifacts.

    Raises:
        ConfigError: For an unknown problem or an unwritable output directory.
        IntegrityError: When an internal consistency check fails.
    """
    if command not in STAGES:
        raise ValueError(f"unknown command '{command}'")
    state = RunState(config)
    writer = ReportWriter(config.problem_dir)
    verdict = Verdict(problem_id=config.problem_id, command=command)
    logger.info(f"running {command} on {config.problem_id} with {config.grid_n} intervals")

    for stage in _stages(config, command):
        STAGE_RUNNERS[stage](state, writer, verdict)

    writer.json(
        "run_meta.json",
        {
            "timestamp": datetime.now(UTC).isoformat(),
            "version": get_version(),
            "command": command,
            "config": config.to_dict(),
        },
    )
    verdict.artifacts = sorted([*writer.artifacts, "verdict.json"])
    writer.json("verdict.json", verdict.to_dict())
    logger.info(f"{command} on {config.problem_id} finished with exit code {verdict.exit_code}")
    return verdict
