"""
Test suite for the second-order checks.

Tests cover the F and G kernels, the necessary double integral Q in its three
forms, the pointwise test, the trace identity, the second quotient oracle,
control families, the sufficient fit and the quadratic-growth check.
"""

import numpy as np
import pytest

from socverify.errors import DegenerateFamilyError, DomainError
from socverify.ode.grid import TimeGrid
from socverify.ode.quadrature import tri_double_integral
from socverify.pmp import singular_set
from socverify.problems.library import integrator_domain
from socverify.problems.models import PiecewiseControl
from socverify.soc import (
    FamilyMember,
    FamilySpec,
    SocKernelContext,
    SocReport,
    control_family,
    farthest_pair,
    growth_check,
    kernel_F,
    kernel_G,
    kernel_series,
    necessary_Q,
    necessary_Q_via_variation,
    pointwise_test,
    pointwise_value,
    second_quotient_oracle,
    sufficient_fit,
    trace_identity_check,
)

from .conftest import constant


def _unit(ctx):
    return constant(integrator_domain(), 1.0, ctx.grid.intervals)


def _constants_only():
    return FamilySpec(constants=True, switches=0, random=0)


@pytest.mark.unit
class TestKernels:
    """Test the F and G kernels."""

    def test_integrator_kernels(self, p1_ctx):
        """Test F = -W and G = 1 for P1 with v = 1."""
        k = 250
        t = p1_ctx.grid.nodes[k]

        assert kernel_F(p1_ctx, k, 4)[0] == pytest.approx(-2.0 * (1.0 - t))
        assert kernel_G(p1_ctx, k, 4)[0] == pytest.approx(1.0)

    def test_kernels_vanish_on_candidate(self, p1_ctx):
        """Test that both kernels are zero at the candidate value."""
        assert kernel_F(p1_ctx, 10, 2)[0] == 0.0
        assert kernel_G(p1_ctx, 10, 2)[0] == 0.0

    def test_context_caches(self, sine_candidate):
        """Test that ensure() fills the requested pairs once."""
        ctx = SocKernelContext(sine_candidate)

        ctx.ensure([0, 1, 2], [4, 4, 4])

        assert ctx.f(1, 4)[0] == pytest.approx(np.sin(sine_candidate.x.values[1, 0]) + 1.0)


@pytest.mark.unit
class TestNecessaryQ:
    """Test the double integral Q(u)."""

    def test_integrator_values(self, p1_ctx, p2_ctx):
        """Test Q(1) = 1/3 on P1 and -1/3 on P2."""
        assert necessary_Q(p1_ctx, _unit(p1_ctx)) == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert necessary_Q(p2_ctx, _unit(p2_ctx)) == pytest.approx(-1.0 / 3.0, abs=1e-12)

    def test_quadratic_in_amplitude(self, p2_ctx):
        """Test Q(v) = -v^2 / 3 for constant controls on P2."""
        half = constant(integrator_domain(), -0.5, p2_ctx.grid.intervals)

        assert necessary_Q(p2_ctx, half) == pytest.approx(-1.0 / 12.0, abs=1e-12)

    def test_zero_for_candidate(self, p1_ctx):
        """Test Q(u_bar) = 0."""
        assert necessary_Q(p1_ctx, p1_ctx.candidate.control) == 0.0

    def test_variation_form_integrator(self, p1_ctx):
        """Test the single-integral form against the exact value."""
        assert necessary_Q_via_variation(p1_ctx, _unit(p1_ctx)) == pytest.approx(1.0 / 3.0, abs=1e-10)

    def test_pairwise_matches_separable(self, p3_coarse):
        """Test that the kernel-by-kernel double integral equals the separable one."""
        ctx = SocKernelContext(p3_coarse)
        rng = np.random.default_rng(9)
        u = PiecewiseControl(p3_coarse.control.domain, rng.integers(0, 41, p3_coarse.grid.intervals))

        outer, inner = kernel_series(ctx, u.node_indices())
        pairwise = -tri_double_integral(lambda k, j: float(outer[k] @ inner[j]), ctx.grid)

        assert pairwise == pytest.approx(necessary_Q(ctx, u), rel=1e-10)

    def test_variation_form_matches(self, p3_coarse):
        """Test that the variation form agrees with the double integral up to grid error."""
        ctx = SocKernelContext(p3_coarse)
        u = PiecewiseControl.constant(p3_coarse.control.domain, 30, p3_coarse.grid.intervals)

        assert necessary_Q_via_variation(ctx, u) == pytest.approx(necessary_Q(ctx, u), rel=2e-2)

    @pytest.mark.slow
    def test_random_singular_controls_nonpositive(self, p2_ctx):
        """Test Q <= 1e-4 on 100 random controls for P2, where every control is singular."""
        rng = np.random.default_rng(0)
        domain = integrator_domain()
        for _ in range(100):
            u = PiecewiseControl(domain, rng.integers(0, 5, p2_ctx.grid.intervals))
            assert necessary_Q(p2_ctx, u) <= 1e-4


@pytest.mark.unit
class TestPointwise:
    """Test the pointwise second-order test."""

    def test_integrator_value(self, p1_ctx):
        """Test D(t, v) = 2 (1 - t) v^2 on P1."""
        k = 400
        t = p1_ctx.grid.nodes[k]

        assert pointwise_value(p1_ctx, k, 0) == pytest.approx(2.0 * (1.0 - t))
        assert pointwise_value(p1_ctx, k, 3) == pytest.approx(0.5 * (1.0 - t))

    def test_integrator_violated(self, p1, p1_ctx):
        """Test that P1 violates the pointwise condition almost everywhere."""
        report = pointwise_test(p1_ctx, singular_set(p1, 1e-6), 1e-8)

        assert not report.passed
        assert report.violation_measure >= 0.9
        assert report.checked_pairs == 5 * (p1.grid.intervals + 1)
        assert report.to_dict()["verdict"] == "violated"
        assert len(report.to_dict()["violations"]) == 200

    def test_minimising_integrator_passes(self, p2, p2_ctx):
        """Test that P2 passes with D = -2 (1 - t) v^2."""
        report = pointwise_test(p2_ctx, singular_set(p2, 1e-6), 1e-8)

        assert report.passed
        assert report.violations == []


@pytest.mark.unit
class TestTraceIdentity:
    """Test the trace identity between H_xx and W."""

    def test_integrator(self, p1_ctx):
        """Test lhs = rhs = -1/3 for P1 with u = 1."""
        lhs, rhs, gap = trace_identity_check(p1_ctx, _unit(p1_ctx))

        assert lhs == pytest.approx(-1.0 / 3.0, abs=1e-12)
        assert rhs == pytest.approx(-1.0 / 3.0, abs=1e-12)
        assert gap <= 1e-10

    def test_scalar_lq_random_controls(self, p3):
        """Test the identity on 20 random controls for the LQ problem."""
        ctx = SocKernelContext(p3)
        rng = np.random.default_rng(4)
        for _ in range(20):
            u = PiecewiseControl(p3.control.domain, rng.integers(0, 401, p3.grid.intervals))
            _, _, gap = trace_identity_check(ctx, u)
            assert gap <= 1e-8

    def test_candidate_trivial(self, p1_ctx):
        """Test the zero triple for u = u_bar."""
        assert trace_identity_check(p1_ctx, p1_ctx.candidate.control) == (0.0, 0.0, 0.0)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", [0, 1])
    def test_scalar_lq_fine_grid(self, p3_fine, seed):
        """Test the identity within 1e-5 on 20 random controls at 2000 intervals and 401 samples."""
        ctx = SocKernelContext(p3_fine)
        rng = np.random.default_rng(seed)
        for _ in range(20):
            u = PiecewiseControl(p3_fine.control.domain, rng.integers(0, 401, p3_fine.grid.intervals))
            lhs, rhs, gap = trace_identity_check(ctx, u)
            assert gap <= 1e-5
            assert lhs == pytest.approx(rhs, rel=1e-5)


@pytest.mark.unit
class TestSecondQuotientOracle:
    """Test (J(sigma^alpha) - J(u_bar)) / alpha^2 against -Q."""

    def test_integrator(self, p1, p1_ctx):
        """Test quotients equal to -1/3 for every alpha on P1."""
        report = second_quotient_oracle(p1_ctx, _unit(p1_ctx), [0.5, 0.25, 0.125], singular_set(p1, 1e-6))

        assert report.target == pytest.approx(-1.0 / 3.0, abs=1e-12)
        for row in report.rows:
            assert row["quotient"] == pytest.approx(-1.0 / 3.0, abs=1e-10)

    def test_minimising_integrator(self, p2_ctx):
        """Test quotients equal to 1/3 on P2."""
        report = second_quotient_oracle(p2_ctx, _unit(p2_ctx), [0.5, 0.25])

        assert all(error <= 1e-10 for error in report.errors())


@pytest.mark.unit
class TestControlFamily:
    """Test deterministic control families."""

    def test_composition(self):
        """Test constants, switches and random members in order."""
        domain = integrator_domain()
        family = control_family(domain, TimeGrid(1.0, 100), FamilySpec(switches=4, random=3, seed=1))

        kinds = [m.kind for m in family]
        assert kinds == ["constant"] * 5 + ["switch"] * 4 + ["random"] * 3
        assert family[0].label == "constant[-1.0]"

    def test_switch_members(self):
        """Test that switches alternate between the farthest points."""
        domain = integrator_domain()
        family = control_family(domain, TimeGrid(1.0, 100), FamilySpec(constants=False, switches=4, random=0))

        first, second = family[0].control.values, family[1].control.values
        assert first[:20].tolist() == [0] * 20 and first[20:].tolist() == [4] * 80
        assert second[:40].tolist() == [4] * 40 and second[40:].tolist() == [0] * 60
        assert family[0].label == "switch[1]@0.2"

    def test_base_removed(self, p1):
        """Test that members equal to the candidate are dropped."""
        family = control_family(integrator_domain(), p1.grid, _constants_only(), base=p1.control)

        assert [m.label for m in family] == ["constant[-1.0]", "constant[-0.5]", "constant[0.5]", "constant[1.0]"]

    def test_seeded(self):
        """Test that the random members depend only on the seed."""
        domain = integrator_domain()
        grid = TimeGrid(1.0, 100)
        spec = FamilySpec(constants=False, switches=0, random=4, seed=7, blocks=10)

        a = control_family(domain, grid, spec)
        b = control_family(domain, grid, spec)

        assert all(np.array_equal(x.control.values, y.control.values) for x, y in zip(a, b, strict=True))
        assert all(len(set(m.control.values[:10].tolist())) == 1 for m in a)

    def test_farthest_pair(self):
        """Test the farthest pair of the integrator domain."""
        assert farthest_pair(integrator_domain()) == (0, 4)

    def test_invalid_spec(self):
        """Test that negative sizes raise DomainError."""
        with pytest.raises(DomainError):
            FamilySpec(switches=-1)


@pytest.mark.unit
class TestSufficientFit:
    """Test the beta fit and the growth check."""

    def test_minimising_integrator(self, p2, p2_ctx):
        """Test beta_hat = 1/3 over the constants of P2."""
        family = control_family(integrator_domain(), p2.grid, _constants_only(), base=p2.control)

        fit = sufficient_fit(p2_ctx, family, p2.problem.modulus, workers=1)

        assert fit.beta_hat == pytest.approx(1.0 / 3.0, abs=1e-10)
        assert fit.beta_hat_constants == pytest.approx(1.0 / 3.0, abs=1e-10)
        assert fit.established
        assert fit.violating is None
        assert fit.to_dict()["scope"] == "sampled family only"

    def test_maximising_integrator_not_established(self, p1, p1_ctx):
        """Test that P1 has a negative fitted beta and names the violating member."""
        family = control_family(integrator_domain(), p1.grid, _constants_only(), base=p1.control)

        fit = sufficient_fit(p1_ctx, family, p1.problem.modulus, workers=1)

        assert fit.beta_hat == pytest.approx(-1.0 / 3.0, abs=1e-10)
        assert not fit.established
        assert fit.violating is not None

    def test_pooled_fit_matches(self, p2, p2_ctx):
        """Test that the pooled fit gives the same rows as the sequential one."""
        family = control_family(
            integrator_domain(), p2.grid, FamilySpec(switches=3, random=4, seed=2), base=p2.control
        )

        sequential = sufficient_fit(p2_ctx, family, p2.problem.modulus, workers=1)
        pooled = sufficient_fit(p2_ctx, family, p2.problem.modulus, workers=2)

        assert sequential.rows == pooled.rows

    def test_empty_family(self, p2_ctx):
        """Test that an empty family raises DegenerateFamilyError."""
        with pytest.raises(DegenerateFamilyError):
            sufficient_fit(p2_ctx, [], lambda r: r)

    def test_only_candidate(self, p2, p2_ctx):
        """Test that a family made of the candidate raises DegenerateFamilyError."""
        family = [FamilyMember("candidate", "constant", p2.control)]

        with pytest.raises(DegenerateFamilyError):
            sufficient_fit(p2_ctx, family, lambda r: r)

    def test_growth_holds(self, p2, p2_ctx):
        """Test J(u) >= beta/2 R(u) for the constants of P2."""
        family = control_family(integrator_domain(), p2.grid, _constants_only(), base=p2.control)

        growth = growth_check(p2_ctx, family, 1.0 / 3.0, 10.0, p2.problem.modulus, workers=1)

        assert growth.passed
        assert len(growth.rows) == 4
        assert growth.skipped == 0

    def test_growth_fails_for_large_beta(self, p2, p2_ctx):
        """Test that an overstated beta produces failures."""
        family = control_family(integrator_domain(), p2.grid, _constants_only(), base=p2.control)

        growth = growth_check(p2_ctx, family, 100.0, 10.0, p2.problem.modulus)

        assert not growth.passed
        assert len(growth.failures) == 4
        assert growth.to_dict()["passed"] is False

    def test_growth_neighbourhood(self, p2, p2_ctx):
        """Test that members outside the eps0 neighbourhood are skipped."""
        family = control_family(integrator_domain(), p2.grid, _constants_only(), base=p2.control)

        growth = growth_check(p2_ctx, family, 1.0 / 3.0, 0.75, p2.problem.modulus)

        assert growth.skipped == 2
        assert [row["label"] for row in growth.rows] == ["constant[-0.5]", "constant[0.5]"]

    def test_growth_needs_positive_beta(self, p2_ctx):
        """Test that a non-positive beta raises DomainError."""
        with pytest.raises(DomainError):
            growth_check(p2_ctx, [], 0.0, 1.0, lambda r: r)

    @pytest.mark.slow
    def test_default_family_on_minimising_integrator(self, p2, p2_ctx):
        """Test the default family of P2: a positive beta_hat below 1/3 that passes growth at eps0 = 1."""
        family = control_family(integrator_domain(), p2.grid, FamilySpec(), base=p2.control)

        fit = sufficient_fit(p2_ctx, family, p2.problem.modulus, workers=1)
        growth = growth_check(p2_ctx, family, fit.beta_hat, 1.0, p2.problem.modulus, workers=1)

        assert len(family) == 4 + 20 + 50
        assert 0.0 < fit.beta_hat <= 1.0 / 3.0 + 1e-10
        assert fit.beta_hat_constants == pytest.approx(1.0 / 3.0, abs=1e-10)
        assert fit.established and fit.violating is None
        assert growth.passed
        assert growth.skipped == 0
        assert len(growth.rows) == len(family)


@pytest.mark.unit
class TestSocReport:
    """Test the aggregated second-order report."""

    def test_verdict(self):
        """Test the largest Q and the verdict against eta."""
        report = SocReport(
            eta_soc=1e-8,
            members=[{"label": "a", "Q": -0.2}, {"label": "b", "Q": 0.1}],
            trace=(-1.0, -1.0, 0.0),
        )

        assert report.Q == 0.1
        assert report.worst == "b"
        assert report.verdict == "violated"
        assert report.to_dict()["trace_identity"]["gap"] == 0.0

    def test_empty(self):
        """Test an empty report."""
        report = SocReport(eta_soc=1e-8)

        assert report.Q == 0.0
        assert report.worst is None
        assert report.verdict == "pass"
        assert report.pointwise_verdict == "pass"
        assert report.beta_hat is None
        assert report.growth_failures == []
