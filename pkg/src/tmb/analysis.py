"""Nodal decomposition, energy evaluation, and residual checks.

Every check here is an exact identity for exact solutions, so the
residuals certify the solver end to end: the per-domain Nehari identity
(dirichlet == nehari), the log-weighted peak identity, the first-integral
boundary relation, and a Sturm-type upper bound on the zero count after a
Liouville change of variables.

All integrals of the form int(... r dr) are read from the augmented
trajectory channels; only the log-weighted integrals and the Sturm bound
run dedicated adaptive quadrature on the dense interpolant (in log-radius,
where the concentrated mass is spread out).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .nonlinearity import f_over_t, scaled_lambda_f
from .quadrature import adaptive_quadrature
from .shooting import RadialSolution

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class NodalDomain:
    """One sign region of a nodal solution with its peak and energies."""

    index: int
    inner_radius: float
    outer_radius: float
    peak_radius: float
    peak_value: float
    sign: int
    dirichlet: float
    nehari: float
    potential: float
    outer_slope: float


@dataclass(frozen=True)
class EnergyReport:
    """Full-disk energies: full_dirichlet = int_B |grad u|^2."""

    full_dirichlet: float
    functional: float
    per_domain: tuple


def decompose(sol: RadialSolution) -> list[NodalDomain]:
    """Split a solution into its k+1 nodal domains.

    Per-domain integrals are differences of the running trajectory
    channels at the refined zero radii.
    """
    traj = sol.trajectory
    domains = []
    prev_r = 0.0
    prev = None  # channel state at the inner boundary
    for i in range(1, sol.k + 2):
        r_i = sol.nodal_radii[i - 1]
        state = traj.state_at(r_i)
        if prev is None:
            dirichlet = state.e_dirichlet
            nehari = state.e_nehari
            potential = state.e_potential
        else:
            dirichlet = state.e_dirichlet - prev.e_dirichlet
            nehari = state.e_nehari - prev.e_nehari
            potential = state.e_potential - prev.e_potential
        domains.append(NodalDomain(
            index=i,
            inner_radius=prev_r,
            outer_radius=r_i,
            peak_radius=sol.peak_radii[i - 1],
            peak_value=sol.peak_values[i - 1],
            sign=sol.domain_sign(i),
            dirichlet=dirichlet,
            nehari=nehari,
            potential=potential,
            outer_slope=sol.boundary_slopes[i - 1],
        ))
        prev_r = r_i
        prev = state
    return domains


def energy_report(sol: RadialSolution) -> EnergyReport:
    domains = decompose(sol)
    full = TWO_PI * sum(d.dirichlet for d in domains)
    potential = TWO_PI * sum(d.potential for d in domains)
    return EnergyReport(full_dirichlet=full,
                        functional=0.5 * full - potential,
                        per_domain=tuple(domains))


def _log_weighted_integral(sol: RadialSolution, r_lo: float, r_hi: float,
                           weight) -> float:
    """int_{r_lo}^{r_hi} lambda*f(u(r)) * r * weight(r) dr on the dense
    trajectory, integrated in tau = ln r (mass near the origin is spread
    over O(1) in tau)."""
    traj = sol.trajectory
    p = sol.params

    def integrand(tau):
        r = math.exp(tau)
        u = traj.u(r)
        return scaled_lambda_f(u, p) * r * r * weight(r)

    lo = max(r_lo, traj.r_start)
    t_lo, t_hi = math.log(lo), math.log(r_hi)
    # the concentrated mass spans O(1) in tau; seed the partition so the
    # initial rule cannot step over it
    n0 = max(4, min(64, int((t_hi - t_lo) / 2.0) + 1))
    val = adaptive_quadrature(integrand, t_lo, t_hi, rel_tol=1e-9,
                              max_depth=40, initial_intervals=n0)
    if r_lo < traj.r_start:
        # analytic head on [0, r_start] where u ~ amplitude:
        # int_0^{r0} g r ln(c/r) dr = (g r0^2/2) ln(c/(r0 e^{-1/2})),
        # i.e. the weight evaluated at r0*e^{-1/2} -- exact for log weights
        g = scaled_lambda_f(traj.initial_amplitude, p)
        r0 = traj.r_start
        val += g * 0.5 * r0 * r0 * weight(r0 * 0.6065306597126334)
    return val


def identity_residual(sol: RadialSolution, i: int) -> float:
    """Relative residual of the log-weighted peak identity on domain i.

    Outer form:  mu_i = int_{rho_i}^{r_i} lambda f(u) r ln(r_i/r) dr.
    For i >= 2 the inner form (weight ln(r/r_{i-1}) on [r_{i-1}, rho_i])
    is checked too and the larger residual is returned.
    """
    if not (1 <= i <= sol.k + 1):
        raise ValueError(f"domain index {i} out of range 1..{sol.k + 1}")
    mu = sol.peak_values[i - 1]
    rho = sol.peak_radii[i - 1]
    r_i = sol.nodal_radii[i - 1]
    ln_ri = math.log(r_i)
    outer = _log_weighted_integral(sol, rho, r_i, lambda r: ln_ri - math.log(r))
    res = abs(abs(outer) - mu) / mu
    if i >= 2:
        r_im1 = sol.nodal_radii[i - 2]
        ln_rim1 = math.log(r_im1)
        inner = _log_weighted_integral(sol, r_im1, rho,
                                       lambda r: math.log(r) - ln_rim1)
        res = max(res, abs(abs(inner) - mu) / mu)
    return res


def boundary_flux(sol: RadialSolution, i: int) -> float:
    """mu_i * r_i * |u'(r_i)| (tends to 2 on concentrating domains)."""
    if not (1 <= i <= sol.k + 1):
        raise ValueError(f"domain index {i} out of range 1..{sol.k + 1}")
    return (sol.peak_values[i - 1] * sol.nodal_radii[i - 1]
            * abs(sol.boundary_slopes[i - 1]))


def nehari_residual(sol: RadialSolution) -> float:
    """|sum dirichlet - sum nehari| / sum dirichlet over all domains."""
    end = sol.trajectory.state_at(sol.nodal_radii[-1])
    if end.e_dirichlet <= 0.0:
        raise ValueError("degenerate solution: no Dirichlet energy")
    return abs(end.e_dirichlet - end.e_nehari) / end.e_dirichlet


def sturm_bound_check(sol: RadialSolution) -> tuple:
    """Zero-count bound after the Liouville transform r = 1/(1 - ln t).

    With v(r) = r*u(t), t = exp(1 - 1/r), the transformed equation is
    v'' + q v = 0 with q(r) = t^2 (ln(e/t))^4 lambda f(u(t))/u(t) >= 0.
    If v has m zeros in (a, b], then m < ((b-a) int_a^b q)^(1/2)/2 + 1.
    Returns (bound_rhs, holds).  Requires k >= 1.
    """
    if sol.k < 1:
        raise ValueError("the zero-count bound needs a nodal solution (k >= 1)")
    # innermost usable radius: second zero when available, else the first
    t_lo = sol.nodal_radii[1] if sol.k >= 2 else sol.nodal_radii[0]
    # zeros of v in (a, 1], including the boundary zero r_{k+1} = 1
    zero_count = sum(1 for r in sol.nodal_radii if r > t_lo)
    a = 1.0 / (1.0 - math.log(t_lo))
    b = 1.0
    traj = sol.trajectory
    p = sol.params

    def q(rr):
        t = math.exp(1.0 - 1.0 / rr)
        u = traj.u(t)
        log_weight = 1.0 / rr  # ln(e/t) = 1 - ln t
        return t * t * log_weight ** 4 * p.lam * f_over_t(u, p)

    integral = adaptive_quadrature(q, a, b, rel_tol=1e-8, max_depth=40,
                                   initial_intervals=8)
    bound = 0.5 * math.sqrt((b - a) * integral) + 1.0
    return bound, zero_count < bound
