"""
Pytest configuration and fixtures for socverify testing.

This module provides shared fixtures for all tests: the built-in problems on
their grids, solved candidates (session-scoped, they are reused read-only), a
nonlinear scalar problem x' = sin x + u for convergence tests, and temporary
directories for report output.
"""

import math
import tempfile
from collections.abc import Generator
from functools import cache
from pathlib import Path

import numpy as np
import pytest

from socverify.ode.grid import TimeGrid
from socverify.problems.library import builtin_problem, integrator_domain
from socverify.problems.models import ControlDomain, PiecewiseControl, Problem
from socverify.soc.kernels import SocKernelContext
from socverify.trajectories.adjoint import Candidate, analyze_candidate


def constant(domain: ControlDomain, value: float, intervals: int) -> PiecewiseControl:
    """Constant control at the domain point with the given payload."""
    return PiecewiseControl.constant(domain, domain.points.index(value), intervals)


@cache
def solved(problem_id: str, grid_n: int = 1000, domain_samples: int = 401) -> Candidate:
    problem, _, control = builtin_problem(problem_id, grid_n, domain_samples)
    return analyze_candidate(problem, control, TimeGrid(problem.horizon, grid_n))


@pytest.fixture
def temp_dir() -> Generator[str, None, None]:
    """Create a temporary directory for test files."""
    with tempfile.TemporaryDirectory() as td:
        yield td


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    """Nested output directory that does not exist yet."""
    return tmp_path / "results" / "nested"


@pytest.fixture(scope="session")
def p1() -> Candidate:
    """P1 (x' = u, f0 = -x^2) with the zero candidate on 1000 intervals."""
    return solved("P1")


@pytest.fixture(scope="session")
def p2() -> Candidate:
    """P2 (x' = u, f0 = x^2) with the zero candidate on 1000 intervals."""
    return solved("P2")


@pytest.fixture(scope="session")
def p3() -> Candidate:
    """P3 (scalar LQ) with the snapped Riccati candidate, 401 samples, 1000 intervals."""
    return solved("P3")


@pytest.fixture(scope="session", params=["P1", "P2", "P3"])
def builtin_fine(request: pytest.FixtureRequest) -> Candidate:
    """Each built-in problem with its candidate on 2000 intervals."""
    return solved(request.param, grid_n=2000)


@pytest.fixture(scope="session")
def p3_fine() -> Candidate:
    return solved("P3", grid_n=2000)


@pytest.fixture(scope="session")
def p3_coarse() -> Candidate:
    """P3 on a coarse domain (41 samples) for tests that scan many controls."""
    return solved("P3", grid_n=400, domain_samples=41)


@pytest.fixture(scope="session")
def p1_ctx(p1: Candidate) -> SocKernelContext:
    return SocKernelContext(p1)


@pytest.fixture(scope="session")
def p2_ctx(p2: Candidate) -> SocKernelContext:
    return SocKernelContext(p2)


def sine_problem(modulus: bool = False) -> Problem:
    """x' = sin x + u, f0 = x^2, x(0) = 0.5 on [0, 1]."""
    return Problem(
        name="sine",
        horizon=1.0,
        x0=np.array([0.5]),
        dynamics=lambda t, x, u: np.array([math.sin(x[0]) + u]),
        running_cost=lambda t, x, u: float(x[0]) ** 2,
        jacobian=lambda t, x, u: np.array([[math.cos(x[0])]]),
        cost_gradient=lambda t, x, u: np.array([2.0 * x[0]]),
        hessians=lambda t, x, u: [np.array([[2.0]]), np.array([[-math.sin(x[0])]])],
        lipschitz=12.0,
        modulus=(lambda r: r) if modulus else None,
        state_box=5.0,
    )


@pytest.fixture(scope="session")
def sine() -> Problem:
    return sine_problem()


@pytest.fixture(scope="session")
def sine_candidate(sine: Problem) -> Candidate:
    """The sine problem with u = 0 on the five-point integrator domain, 1000 intervals."""
    domain = integrator_domain()
    grid = TimeGrid(sine.horizon, 1000)
    return analyze_candidate(sine, constant(domain, 0.0, grid.intervals), grid)
