"""Blow-up rescaling diagnostics.

A concentrating nodal domain, rescaled by its peak data, approaches the
radial Liouville profile

    z(r) = ln(64 / (8 + r^2)^2),   -z'' - z'/r = e^z,  int e^z r dr = 4,

with first-order correction phi/mu^(2-beta),

    phi(r) = alpha*beta_lim*(ln(8 + r^2) + 8/(8 + r^2) - 1 - ln 8).

This module builds the rescaled samples z_n, measures the deviation from
z, fits the correction coefficient, and verifies the two-sided monotone
derivative bounds that hold for every rescaled solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OverflowBudgetError, WindowTooLargeError
from .nonlinearity import ProblemParams
from .shooting import RadialSolution

PROFILE_WINDOW = 6.0
FIT_WINDOW = (0.5, 6.0)
FIT_POINTS = 56  # uniform grid over FIT_WINDOW
_LN64 = math.log(64.0)
_LN8 = math.log(8.0)


@dataclass(frozen=True)
class BubbleDiagnostics:
    """Rescaled profile samples and correction fit for one domain."""

    domain_index: int
    mu: float
    gamma: float
    rho_over_gamma: float
    samples: tuple             # (r, z_n(r)) pairs on the requested grid
    sup_deviation: float       # max over the window of |z_n - z|
    corr_coefficient: float    # least-squares c in z_n - z ~ c*phi
    predicted_coefficient: float  # 1/mu^(2-beta)

    @property
    def coefficient_ratio(self) -> float:
        return self.corr_coefficient / self.predicted_coefficient


def gamma_scale(mu: float, p: ProblemParams) -> float:
    """gamma = (2*lambda*mu*f(mu))^(-1/2), computed in log space."""
    if not (mu > 0.0):
        raise ValueError(f"peak value must be positive, got {mu!r}")
    log_arg = (math.log(2.0) + p.log_lambda + 2.0 * math.log(mu)
               + mu * mu + p.alpha * mu ** p.beta)
    if log_arg > 2.0 * 709.0:
        raise OverflowBudgetError(log_arg)
    return math.exp(-0.5 * log_arg)


def liouville_reference(r: float, beta_star: float, alpha: float) -> tuple:
    """(z(r), phi(r)): the limit profile and its first-order correction."""
    q = 8.0 + r * r
    z = _LN64 - 2.0 * math.log(q)
    phi = alpha * beta_star * (math.log(q) + 8.0 / q - 1.0 - _LN8)
    return z, phi


def default_profile_grid(n: int = 61) -> tuple:
    """Uniform sample grid on [0, PROFILE_WINDOW]."""
    step = PROFILE_WINDOW / (n - 1)
    return tuple(j * step for j in range(n))


def rescale_profile(sol: RadialSolution, i: int, grid=None) -> BubbleDiagnostics:
    """Sample z_n(r) = 2*mu_i*(|u|(gamma_i r + rho_i) - mu_i) on the grid.

    The grid may contain negative entries for i >= 2 (inward window); it
    must stay inside the nodal domain, else WindowTooLargeError.
    """
    if not (1 <= i <= sol.k + 1):
        raise ValueError(f"domain index {i} out of range 1..{sol.k + 1}")
    if grid is None:
        grid = default_profile_grid()
    mu = sol.peak_values[i - 1]
    rho = sol.peak_radii[i - 1]
    gamma = gamma_scale(mu, sol.params)
    r_outer = sol.nodal_radii[i - 1]
    r_inner = 0.0 if i == 1 else sol.nodal_radii[i - 2]
    lo, hi = min(grid), max(grid)
    if gamma * hi + rho >= r_outer:
        raise WindowTooLargeError(
            f"window reaches {gamma * hi + rho!r}, outside domain "
            f"(..., {r_outer!r})")
    inner_edge = gamma * lo + rho
    if inner_edge < r_inner or (i >= 2 and inner_edge <= r_inner):
        raise WindowTooLargeError(
            f"window reaches {inner_edge!r}, inside inner radius {r_inner!r}")
    traj = sol.trajectory
    sign = sol.domain_sign(i)

    def z_n(rr):
        if rr == 0.0:
            return 0.0  # definition evaluated at the peak
        return 2.0 * mu * (sign * traj.u(gamma * rr + rho) - mu)

    samples = tuple((rr, z_n(rr)) for rr in grid)
    sup_dev = max(abs(zv - liouville_reference(rr, sol.params.beta,
                                               sol.params.alpha)[0])
                  for rr, zv in samples)
    # least-squares c on the dedicated uniform fit grid
    flo, fhi = FIT_WINDOW
    fstep = (fhi - flo) / (FIT_POINTS - 1)
    num = 0.0
    den = 0.0
    for j in range(FIT_POINTS):
        rr = flo + j * fstep
        if gamma * rr + rho >= r_outer:
            break
        zv = z_n(rr)
        zr, ph = liouville_reference(rr, sol.params.beta, sol.params.alpha)
        num += ph * (zv - zr)
        den += ph * ph
    corr = num / den if den > 0.0 else math.nan
    return BubbleDiagnostics(
        domain_index=i,
        mu=mu,
        gamma=gamma,
        rho_over_gamma=rho / gamma,
        samples=samples,
        sup_deviation=sup_dev,
        corr_coefficient=corr,
        predicted_coefficient=mu ** (sol.params.beta - 2.0),
    )


def derivative_bound_check(diag: BubbleDiagnostics, sol: RadialSolution,
                           i: int, slack: float = 1e-6) -> bool:
    """Two-sided monotone bound on the rescaled derivative.

    For r >= 0:  0 <= -z_n'(r) <= (r^2/2 + (rho/gamma)*r) / (r + rho/gamma),
    mirrored for r < 0 when the window extends inward (i >= 2).
    `slack` absorbs interpolation roundoff.
    """
    mu = diag.mu
    gamma = diag.gamma
    rho = sol.peak_radii[i - 1]
    m = diag.rho_over_gamma
    sign = sol.domain_sign(i)
    traj = sol.trajectory
    for rr, _ in diag.samples:
        zp = 2.0 * mu * gamma * sign * traj.du(gamma * rr + rho)
        if rr >= 0.0:
            denom = rr + m
            bound = (0.5 * rr * rr + m * rr) / denom if denom > 0.0 else 0.0
            if not (-slack <= -zp <= bound + slack):
                return False
        else:
            denom = rr + m
            if denom <= 0.0:
                continue  # outside the transform's validity
            bound = -(0.5 * rr * rr + m * rr) / denom
            if not (-slack <= zp <= bound + slack):
                return False
    return True
