"""Construction of nodal radial solutions on the unit disk by shooting.

The two-point problem is reduced to an initial-value one: integrate at
lambda = 1 from amplitude s until the (k+1)-th zero z_{k+1}(s), then use
the dilation u(x) -> u(z*x), which maps that zero to the unit boundary
while lambda transforms as lambda*z^2.  The achieved eigenvalue is

    lambda_of_s(s) = z_{k+1}(s)^2,

and a nodal solution with a prescribed lambda is a scalar root-find in s.
lambda_of_s may be non-monotone, so the root-finder scans a log-spaced
amplitude grid and polishes every bracket (all branches are returned).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import NoSolutionInRangeError, OverflowBudgetError, ZeroNotReachedError
from .nonlinearity import ProblemParams
from .ode import SolverSettings, Trajectory, after_n_zeros, integrate_radial

DEFAULT_SCAN_POINTS = 200
DEFAULT_S_MIN = 1e-6
_BUDGET_MARGIN = 0.5

# lambda(s) evaluations cached per (k, alpha, beta, ...) scan signature
_scan_cache: dict = {}


def scan_settings_from(settings: SolverSettings | None) -> SolverSettings:
    """Relaxed-tolerance settings used only to bracket sign changes."""
    base = settings or SolverSettings()
    return SolverSettings(rel_tol=1e-6, abs_tol=1e-9, max_radius=base.max_radius,
                          max_steps=base.max_steps, step_cap=False,
                          precision=base.precision)


def amplitude_budget(p: ProblemParams, budget: float = 700.0) -> float:
    """Largest amplitude whose lambda=1 nonlinearity stays inside the budget.

    Solves ln(s) + s^2 + alpha*s^beta = budget - margin by bisection.
    """
    target = budget - _BUDGET_MARGIN

    def g(s):
        return math.log(s) + s * s + p.alpha * s ** p.beta - target

    lo, hi = 1.0, 40.0
    while g(hi) < 0.0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-9 * hi:
            break
    return lo


@dataclass(frozen=True)
class RadialSolution:
    """A validated nodal radial solution on the unit disk, u(0) > 0.

    nodal_radii has k+1 entries ending at 1.0; peak_radii/peak_values carry
    the origin peak first; boundary_slopes are u'(r_i) at each nodal radius.
    """

    params: ProblemParams
    k: int
    amplitude: float
    trajectory: Trajectory
    nodal_radii: tuple
    peak_radii: tuple
    peak_values: tuple
    boundary_slopes: tuple

    def __post_init__(self):
        if len(self.nodal_radii) != self.k + 1:
            raise ValueError("nodal radius count does not match the nodal class")
        if len(self.peak_radii) != self.k + 1 or len(self.peak_values) != self.k + 1:
            raise ValueError("peaks must interleave zeros (one per domain)")
        if abs(self.nodal_radii[-1] - 1.0) > 1e-12:
            raise ValueError("outermost zero must sit on the unit boundary")
        if self.peak_values[0] != self.amplitude:
            raise ValueError("first peak must be the central amplitude")

    def domain_sign(self, i: int) -> int:
        """Sign of u on the i-th domain (1-based); u(0) > 0."""
        return 1 if i % 2 == 1 else -1


def solve_unit_lambda(s: float, k: int, p0: ProblemParams,
                      settings: SolverSettings | None = None):
    """Integrate at lambda=1 from amplitude s to the (k+1)-th zero.

    Returns (zeros, trajectory); zeros is the list of the first k+1 zero
    radii.  Raises ZeroNotReachedError if the radius cap or overflow
    budget interferes.
    """
    if p0.lam != 1.0:
        raise ValueError("solve_unit_lambda shoots at lambda = 1")
    if not (s > 0.0):
        raise ValueError(f"amplitude must be positive, got {s!r}")
    try:
        traj = integrate_radial(s, p0, after_n_zeros(k + 1), settings)
    except OverflowBudgetError as exc:
        raise ZeroNotReachedError(
            f"overflow budget hit at radius {exc.radius!r} before zero {k + 1}",
            radius=exc.radius,
        ) from exc
    return [r for r, _ in traj.zeros], traj


def lambda_of_s(s: float, k: int, p0: ProblemParams,
                settings: SolverSettings | None = None) -> float:
    """The unique lambda for which u(z_{k+1} * .) lies in the k-nodal class."""
    zeros, _ = solve_unit_lambda(s, k, p0, settings)
    z = zeros[-1]
    return z * z


def _build_solution(traj: Trajectory, k: int, p0: ProblemParams) -> RadialSolution:
    zeros = traj.zeros
    if len(zeros) < k + 1:
        raise ZeroNotReachedError(f"trajectory carries {len(zeros)} zero(s), need {k + 1}")
    z = zeros[k][0]
    lam = z * z
    params = ProblemParams(p0.alpha, p0.beta, lam)
    scaled = traj.rescaled(z, params)
    nodal_radii = tuple(r for r, _ in scaled.zeros[:k + 1])
    slopes = tuple(sl for _, sl in scaled.zeros[:k + 1])
    interior = [pk for pk in scaled.peaks if pk[0] < nodal_radii[-1]]
    if len(interior) != k:
        raise ZeroNotReachedError(
            f"expected {k} interior peak(s), detected {len(interior)}")
    peak_radii = (0.0,) + tuple(r for r, _ in interior)
    peak_values = (traj.initial_amplitude,) + tuple(a for _, a in interior)
    return RadialSolution(
        params=params,
        k=k,
        amplitude=traj.initial_amplitude,
        trajectory=scaled,
        nodal_radii=nodal_radii,
        peak_radii=peak_radii,
        peak_values=peak_values,
        boundary_slopes=slopes,
    )


def _scan_curve(k: int, p0: ProblemParams, s_min: float, s_max: float,
                n_points: int, settings: SolverSettings):
    """lambda_of_s on a log grid, with None marking failed evaluations."""
    key = (k, p0.alpha, p0.beta, round(math.log(s_min), 12),
           round(math.log(s_max), 12), n_points, settings.precision)
    hit = _scan_cache.get(key)
    if hit is not None:
        return hit
    ratio = (s_max / s_min) ** (1.0 / (n_points - 1))
    grid = [s_min * ratio ** i for i in range(n_points)]
    grid[-1] = s_max
    values = []
    for s in grid:
        try:
            values.append(lambda_of_s(s, k, p0, settings))
        except (OverflowBudgetError, ZeroNotReachedError):
            values.append(None)
    _scan_cache[key] = (grid, values)
    return grid, values


def _secant_stage(feval, xa, fa, ta, xb, fb, tb, tol, max_iter):
    """Safeguarded secant on a bracket; returns ((x, f, traj), bracket)."""
    best = (xb, fb, tb) if abs(fb) < abs(fa) else (xa, fa, ta)
    for _ in range(max_iter):
        x = xb - fb * (xb - xa) / (fb - fa)
        width = abs(xb - xa)
        if not (min(xa, xb) < x < max(xa, xb)):
            x = 0.5 * (xa + xb)
        f, traj = feval(x)
        if abs(f) < abs(best[1]):
            best = (x, f, traj)
        if abs(f) <= tol or width < 1e-15:
            return best, (xa, fa, ta, xb, fb, tb)
        if fa * f < 0.0:
            xb, fb, tb = x, f, traj
        else:
            xa, fa, ta = x, f, traj
    return best, (xa, fa, ta, xb, fb, tb)


def _polish_bracket(k: int, target: float, p0: ProblemParams,
                    s_lo: float, s_hi: float,
                    settings: SolverSettings | None,
                    rel_tol_lambda: float = 1e-10):
    """Two-phase safeguarded secant in (ln s, ln lambda) space.

    A relaxed-tolerance secant shrinks the bracket cheaply; the final
    iterations run at full tolerance.  Returns the trajectory of the
    converged full-tolerance evaluation, or None when the bracket turns
    out not to bracket at all.
    """
    lt = math.log(target)
    coarse = scan_settings_from(settings)

    def feval_with(stg):
        def feval(x):
            zeros, traj = solve_unit_lambda(math.exp(x), k, p0, stg)
            return math.log(zeros[-1] ** 2) - lt, traj
        return feval

    feval_coarse = feval_with(coarse)
    feval_full = feval_with(settings)

    x_lo, x_hi = math.log(s_lo), math.log(s_hi)
    f_lo, traj_lo = feval_coarse(x_lo)
    f_hi, traj_hi = feval_coarse(x_hi)
    if f_lo * f_hi > 0.0:
        # scan-tolerance artifact; retry the endpoints at full tolerance
        f_lo, traj_lo = feval_full(x_lo)
        if abs(f_lo) <= rel_tol_lambda:
            return traj_lo
        f_hi, traj_hi = feval_full(x_hi)
        if abs(f_hi) <= rel_tol_lambda:
            return traj_hi
        if f_lo * f_hi > 0.0:
            return None
        best, _ = _secant_stage(feval_full, x_lo, f_lo, traj_lo,
                                x_hi, f_hi, traj_hi, rel_tol_lambda, 60)
        return best[2] if abs(best[1]) <= rel_tol_lambda else None
    # phase 1: coarse secant down to ~10x the scan noise floor
    (xc, fc, _), (xa, fa, _, xb, fb, _) = _secant_stage(
        feval_coarse, x_lo, f_lo, traj_lo, x_hi, f_hi, traj_hi, 2e-5, 40)
    # phase 2: plain secant at full tolerance, seeded by the coarse slope;
    # the full-tolerance root sits within the scan-noise offset of xc, so
    # a bracket-style safeguard would pin the iterates to the wrong side
    slope = (fb - fa) / (xb - xa) if xb != xa else 1.0
    f1, t1 = feval_full(xc)
    if abs(f1) <= rel_tol_lambda:
        return t1
    x2 = xc - f1 / slope if slope != 0.0 else 0.5 * (xa + xb)
    x2 = min(max(x2, min(x_lo, x_hi)), max(x_lo, x_hi))
    f2, t2 = feval_full(x2)
    xp, fp = xc, f1
    for _ in range(12):
        if abs(f2) <= rel_tol_lambda:
            return t2
        if f2 == fp:
            break
        x_next = x2 - f2 * (x2 - xp) / (f2 - fp)
        x_next = min(max(x_next, min(x_lo, x_hi)), max(x_lo, x_hi))
        xp, fp = x2, f2
        x2 = x_next
        f2, t2 = feval_full(x2)
    if abs(f2) <= rel_tol_lambda:
        return t2
    # plain secant lost its way (coarse slope was scan noise); retry as a
    # safeguarded bracket search at full tolerance on the original bracket
    f_lo, traj_lo = feval_full(x_lo)
    if abs(f_lo) <= rel_tol_lambda:
        return traj_lo
    f_hi, traj_hi = feval_full(x_hi)
    if abs(f_hi) <= rel_tol_lambda:
        return traj_hi
    if f_lo * f_hi > 0.0:
        return None  # a scan-noise artifact, not a root
    best, _ = _secant_stage(feval_full, x_lo, f_lo, traj_lo,
                            x_hi, f_hi, traj_hi, rel_tol_lambda, 60)
    return best[2] if abs(best[1]) <= rel_tol_lambda else None


def nodal_solution(k: int, target_lambda: float, p: ProblemParams,
                   settings: SolverSettings | None = None,
                   scan_points: int = DEFAULT_SCAN_POINTS,
                   s_min: float = DEFAULT_S_MIN,
                   seed_amplitude: float | None = None) -> list[RadialSolution]:
    """All k-nodal solutions with the prescribed eigenvalue found by the scan.

    Scans lambda_of_s on a log-spaced amplitude grid, brackets every sign
    change of lambda_of_s - target_lambda, and polishes each bracket by
    safeguarded secant to relative accuracy 1e-10 in lambda.  With
    seed_amplitude (continuation within a family) a local bracket around
    the seed is tried first and the scan is skipped when it succeeds.

    Raises NoSolutionInRangeError when no bracket exists on the grid.
    """
    if not (target_lambda > 0.0):
        raise ValueError(f"target lambda must be positive, got {target_lambda!r}")
    if k < 0:
        raise ValueError(f"nodal class must be nonnegative, got {k!r}")
    full = settings or SolverSettings()
    coarse = scan_settings_from(full)
    p0 = ProblemParams(p.alpha, p.beta, 1.0)

    if seed_amplitude is not None:
        sol = _continuation_solve(k, target_lambda, p0, seed_amplitude, full, coarse)
        if sol is not None:
            return [sol]

    s_max = amplitude_budget(p0, budget=700.0 if full.precision == "double"
                             else 709.7)
    grid, values = _scan_curve(k, p0, s_min, s_max, scan_points, coarse)
    brackets = []
    valid = [(s, v) for s, v in zip(grid, values) if v is not None]
    for (s1, v1), (s2, v2) in zip(valid, valid[1:]):
        if (v1 - target_lambda) * (v2 - target_lambda) <= 0.0:
            brackets.append((s1, s2))
    if not brackets:
        lams = [v for _, v in valid]
        if not lams:
            raise NoSolutionInRangeError(target_lambda, math.nan, math.nan,
                                         s_min, s_max)
        raise NoSolutionInRangeError(target_lambda, min(lams), max(lams),
                                     s_min, s_max)
    solutions = []
    for s_lo, s_hi in brackets:
        traj = _polish_bracket(k, target_lambda, p0, s_lo, s_hi, full)
        if traj is not None:
            solutions.append(_build_solution(traj, k, p0))
    if not solutions:
        lams = [v for _, v in valid]
        raise NoSolutionInRangeError(target_lambda, min(lams), max(lams),
                                     s_min, s_max)
    solutions.sort(key=lambda sol: sol.amplitude)
    return solutions


def _continuation_solve(k, target, p0, seed, full, coarse):
    """Bracket around a previous member's amplitude; None if it fails."""
    def lam_at(s):
        try:
            return lambda_of_s(s, k, p0, coarse)
        except (OverflowBudgetError, ZeroNotReachedError):
            return None

    s_cap = amplitude_budget(p0, budget=700.0 if coarse.precision == "double"
                             else 709.7)
    lo, hi = seed / 1.3, min(seed * 1.3, s_cap)
    v_lo, v_hi = lam_at(lo), lam_at(hi)
    for _ in range(14):
        if v_lo is not None and v_hi is not None and \
                (v_lo - target) * (v_hi - target) <= 0.0:
            traj = _polish_bracket(k, target, p0, lo, hi, full)
            if traj is None:
                return None
            return _build_solution(traj, k, p0)
        # lambda decreases with amplitude along the branches of interest
        if v_lo is not None and v_lo < target:
            lo /= 1.6
            v_lo = lam_at(lo)
        elif v_hi is not None and v_hi > target and hi < s_cap:
            hi = min(hi * 1.6, s_cap)
            v_hi = lam_at(hi)
        else:
            return None
    return None
