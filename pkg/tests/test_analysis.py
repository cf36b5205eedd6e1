"""Nodal decomposition, energies, and the exact-identity residuals."""

import math

import pytest

from tmb.analysis import (
    boundary_flux,
    decompose,
    energy_report,
    identity_residual,
    nehari_residual,
    sturm_bound_check,
)
from tmb.bessel import j0_prime, j0_zero
from tmb.nonlinearity import ProblemParams, scaled_lambda_f
from tmb.shooting import RadialSolution, nodal_solution

from conftest import SCAN_POINTS

P12 = ProblemParams(alpha=1.0, beta=1.2, lam=1.0)


class TestDecompose:
    def test_single_domain(self, sol_mid):
        doms = decompose(sol_mid)
        assert len(doms) == 1
        d = doms[0]
        assert d.peak_radius == 0.0
        assert d.peak_value == sol_mid.amplitude
        assert d.sign == 1
        assert d.dirichlet > 0.0

    def test_k1_signs(self, sol_k1):
        doms = decompose(sol_k1)
        assert [d.sign for d in doms] == [1, -1]

    def test_telescoping(self, sol_k1):
        doms = decompose(sol_k1)
        end = sol_k1.trajectory.state_at(sol_k1.nodal_radii[-1])
        total = sum(d.dirichlet for d in doms)
        assert abs(total - end.e_dirichlet) <= 1e-12 * end.e_dirichlet

    def test_per_domain_nehari_identity(self, sol_k1, sol_deep):
        for sol in (sol_k1, sol_deep):
            for d in decompose(sol):
                assert abs(d.dirichlet - d.nehari) <= 1e-8 * d.dirichlet


class TestEnergyReport:
    def test_invariants(self, sol_deep):
        rep = energy_report(sol_deep)
        assert rep.full_dirichlet > 0.0
        assert rep.functional < 0.5 * rep.full_dirichlet
        assert rep.full_dirichlet == pytest.approx(
            2.0 * math.pi * sum(d.dirichlet for d in rep.per_domain), rel=1e-14)


class TestPeakIdentity:
    def test_accepted_solutions(self, sol_mid, sol_deep, sol_k1):
        for sol in (sol_mid, sol_deep, sol_k1):
            for i in range(1, sol.k + 2):
                assert identity_residual(sol, i) <= 1e-6

    def test_outer_only_for_first_domain(self, sol_mid):
        # i=1 evaluates just the outer identity; the call must succeed with
        # rho_1 = 0 as the lower endpoint
        assert identity_residual(sol_mid, 1) <= 1e-6

    def test_perturbation_sensitivity(self, sol_mid):
        # scaling u by 1.01 breaks the identity well past 1e-3; evaluated
        # with an independent composite Simpson rule in log radius
        sol = sol_mid
        traj = sol.trajectory
        mu = 1.01 * sol.peak_values[0]
        r1 = sol.nodal_radii[0]
        n = 4000
        lo, hi = math.log(traj.r_start), math.log(r1)
        hstep = (hi - lo) / n

        def g(tau):
            r = math.exp(tau)
            return scaled_lambda_f(1.01 * traj.u(r), sol.params) * r * r * (hi - tau)

        acc = g(lo) + g(hi)
        for j in range(1, n):
            acc += (4.0 if j % 2 else 2.0) * g(lo + j * hstep)
        integral = acc * hstep / 3.0
        residual = abs(integral - mu) / mu
        assert residual > 1e-3

    def test_bad_index(self, sol_mid):
        with pytest.raises(ValueError):
            identity_residual(sol_mid, 2)


class TestBoundaryFlux:
    def test_deep_regime_window(self, sol_deep):
        assert 1.8 <= boundary_flux(sol_deep, 1) <= 2.2

    def test_exact_first_integral(self, sol_deep, sol_k1):
        for sol in (sol_deep, sol_k1):
            for i in range(1, sol.k + 2):
                r_i = sol.nodal_radii[i - 1]
                st = sol.trajectory.state_at(r_i)
                assert abs(r_i * st.du + st.e_source) <= 1e-8

    def test_near_linear_regime(self):
        # u ~ mu * J0(t1 r): flux = mu^2 * t1 * |J0'(t1)|
        from conftest import L1

        sols = nodal_solution(0, L1 * (1.0 - 1e-4), P12,
                              scan_points=SCAN_POINTS)
        sol = sols[0]
        mu = sol.peak_values[0]
        t1 = j0_zero(1).t_k
        expected = mu * mu * t1 * abs(j0_prime(t1))
        assert boundary_flux(sol, 1) == pytest.approx(expected, rel=1e-2)


class TestNehariResidual:
    def test_accepted(self, sol_mid, sol_deep, sol_k1):
        for sol in (sol_mid, sol_deep, sol_k1):
            assert nehari_residual(sol) <= 1e-8

    def test_degenerate_input_rejected(self, sol_mid):
        # a zero function cannot even be represented as a RadialSolution
        with pytest.raises(ValueError):
            RadialSolution(params=sol_mid.params, k=0, amplitude=0.0,
                           trajectory=sol_mid.trajectory,
                           nodal_radii=(1.0,), peak_radii=(0.0,),
                           peak_values=(1.0,), boundary_slopes=(-1.0,))


class TestSturmBound:
    def test_holds_on_nodal_solutions(self, sol_k1):
        bound, holds = sturm_bound_check(sol_k1)
        assert holds
        assert bound > 1.0

    def test_holds_beta_one(self):
        p = ProblemParams(1.0, 1.0, 1.0)
        sol = nodal_solution(1, 4.0, p, scan_points=SCAN_POINTS)[-1]
        bound, holds = sturm_bound_check(sol)
        assert holds and bound > 1.0

    def test_requires_nodal(self, sol_mid):
        with pytest.raises(ValueError):
            sturm_bound_check(sol_mid)

    def test_transform_endpoint(self):
        # t = 1 maps to r = 1/(1 - ln 1) = 1: the outer endpoint is fixed
        assert 1.0 / (1.0 - math.log(1.0)) == 1.0
