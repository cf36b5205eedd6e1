"""Adaptive integration of the radial equation -u'' - u'/r = lambda*f(u)
from the origin, with dense output, event detection, and augmented
quadrature states for the energy integrals.

State vector (6 components):

    y = (u, du, e_dir, e_neh, q_flux, e_src)

    u, du    solution value and radial derivative
    e_dir    running integral of u'(s)^2 * s
    e_neh    running integral of lambda * u * f(u) * s
    q_flux   running integral of lambda * f(u) * u' * s^2; by parts,
             lambda * int F(u) s ds = lambda*F(u(r))*r^2/2 - q_flux/2,
             and the boundary term vanishes at zeros of u.  Carrying
             F(u) itself is impossible in binary64: its derivative
             f(u)*u' overflows for amplitudes above ~21, and the ratio
             F/f has an unstable homogeneous mode growing like
             f(peak)/f(u) ~ exp(2*peak^2).
    e_src    running integral of lambda * f(u) * s  (first integral:
             r*u'(r) + e_src(r) = 0, zero flux at the origin)

The 1/r origin singularity is removed by an analytic series on
[0, r_start]:  u = s - g*r^2/4 + g*g'*r^4/64  with  g(t) = lambda*f(t).
r_start adapts to the bubble scale gamma(s) = (2*lambda*s*f(s))^(-1/2):
a fixed start radius would sit far outside the series' validity range
once the peak sharpens (amplitudes above ~2.5).

Integrator: Dormand-Prince 5(4) with the classical quartic dense output.
Events (zeros of u, interior critical points) are detected by sign change
at step endpoints and polished on the dense interpolant.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from .errors import (
    NoSignChangeError,
    OverflowBudgetError,
    StiffnessError,
    ZeroNotReachedError,
)
from .nonlinearity import ProblemParams, log_abs_lambda_f, primitive_F

# Dormand-Prince 5(4) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# Dense-output weights (order-4 continuous extension).
_D = (
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)

_NCOMP = 6
_RANGE = tuple(range(_NCOMP))
_MIN_STEP_FRACTION = 1e-15  # of the current radius; below this is stiffness

# flattened tableau entries for the unrolled stage loop
_A31, _A32 = _A[2]
_A41, _A42, _A43 = _A[3]
_A51, _A52, _A53, _A54 = _A[4]
_A61, _A62, _A63, _A64, _A65 = _A[5]
_A71, _, _A73, _A74, _A75, _A76 = _A[6]
_C4 = _C[4]
_E1, _, _E3, _E4, _E5, _E6, _E7 = _E
_D1, _, _D3, _D4, _D5, _D6, _D7 = _D


@dataclass(frozen=True)
class StopAfterZeros:
    n: int


@dataclass(frozen=True)
class StopAtRadius:
    radius: float


def after_n_zeros(n: int) -> StopAfterZeros:
    if n < 1:
        raise ValueError("need at least one zero to stop on")
    return StopAfterZeros(n)


def at_radius(radius: float) -> StopAtRadius:
    if not (radius > 0.0):
        raise ValueError("stop radius must be positive")
    return StopAtRadius(radius)


@dataclass(frozen=True)
class SolverSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_radius: float = 1e6
    max_steps: int = 2_000_000
    # cap h at 1e-3 * (distance to last zero) while |u| > 0.9*amplitude;
    # insurance against stepping across the thin transition layer
    step_cap: bool = True
    precision: str = "double"


class RadialState:
    """Solution value, derivative, and running energy integrals at one radius.

    e_potential (the running lambda * int F(u) s ds) is recovered lazily
    from the flux channel: it needs one primitive evaluation unless u is
    small at this radius.
    """

    __slots__ = ("r", "u", "du", "e_dirichlet", "e_nehari", "e_source",
                 "pot_flux", "_params", "_e_pot")

    def __init__(self, r, y, params):
        self.r = r
        self.u = y[0]
        self.du = y[1]
        self.e_dirichlet = y[2]
        self.e_nehari = y[3]
        self.pot_flux = y[4]
        self.e_source = y[5]
        self._params = params
        self._e_pot = None

    @property
    def e_potential(self) -> float:
        if self._e_pot is None:
            p = self._params
            au = abs(self.u)
            if au < 1e-4:
                # F(u) = u^2/2 * (1 + 2 alpha |u|^beta/(beta+2) + O(u^2))
                F = 0.5 * self.u * self.u * (
                    1.0 + 2.0 * p.alpha * au ** p.beta / (p.beta + 2.0))
            else:
                F = primitive_F(self.u, p)
            self._e_pot = 0.5 * (p.lam * F * self.r * self.r - self.pot_flux)
        return self._e_pot

    def __repr__(self):
        return (f"RadialState(r={self.r!r}, u={self.u!r}, du={self.du!r}, "
                f"e_dirichlet={self.e_dirichlet!r})")


class _Step:
    """One accepted step with its dense-output coefficients."""

    __slots__ = ("r0", "h", "y0", "y1", "rcont")

    def __init__(self, r0, h, y0, y1, rcont):
        self.r0 = r0
        self.h = h
        self.y0 = y0
        self.y1 = y1
        self.rcont = rcont  # 5 tuples of _NCOMP floats

    def eval(self, r):
        th = (r - self.r0) / self.h
        c1, c2, c3, c4, c5 = self.rcont
        om = 1.0 - th
        return tuple(
            c1[i] + th * (c2[i] + om * (c3[i] + th * (c4[i] + om * c5[i])))
            for i in range(_NCOMP)
        )

    def eval_component(self, r, i):
        th = (r - self.r0) / self.h
        c1, c2, c3, c4, c5 = self.rcont
        om = 1.0 - th
        return c1[i] + th * (c2[i] + om * (c3[i] + th * (c4[i] + om * c5[i])))


class Trajectory:
    """Dense radial trajectory with detected zeros and interior peaks.

    zeros: list of (radius, slope) with strictly increasing radii.
    peaks: list of (radius, |u|) at interior critical points; the origin
    peak (u(0) = amplitude) is not included here.
    """

    def __init__(self, params: ProblemParams, amplitude: float, r_start: float,
                 series: tuple, steps: list, zeros: list, peaks: list,
                 end_radius: float):
        self.params = params
        self.initial_amplitude = amplitude
        self.r_start = r_start
        self._series = series  # (lg, lgp, w0s) for evaluation below r_start
        self.steps = steps
        self.zeros = zeros
        self.peaks = peaks
        self.end_radius = end_radius
        self._starts = [st.r0 for st in steps]

    # -- dense evaluation ------------------------------------------------

    def _series_eval(self, r):
        lg, lgp, _ = self._series
        s = self.initial_amplitude
        if r == 0.0:
            return (s, 0.0, 0.0, 0.0, 0.0, 0.0)
        lr = math.log(r)

        def ex(logv):
            return math.exp(logv) if logv > -745.0 else 0.0

        u = s - ex(lg + 2 * lr - math.log(4.0)) + ex(lg + lgp + 4 * lr - math.log(64.0))
        du = -ex(lg + lr - math.log(2.0)) + ex(lg + lgp + 3 * lr - math.log(16.0))
        e_dir = ex(2 * lg + 4 * lr - math.log(16.0))
        e_neh = ex(lg + math.log(s) + 2 * lr - math.log(2.0))
        q_flux = -ex(2 * lg + 4 * lr - math.log(8.0))
        e_src = ex(lg + 2 * lr - math.log(2.0)) - ex(lg + lgp + 4 * lr - math.log(16.0))
        return (u, du, e_dir, e_neh, q_flux, e_src)

    def _locate(self, r):
        if r < self.r_start:
            return None
        idx = bisect_right(self._starts, r) - 1
        if idx < 0:
            idx = 0
        st = self.steps[idx]
        if r > st.r0 + st.h and idx + 1 < len(self.steps):
            st = self.steps[idx + 1]
        return st

    def state_at(self, r: float) -> RadialState:
        return RadialState(r, self.eval(r), self.params)

    def eval(self, r: float):
        if r < 0.0:
            raise ValueError(f"negative radius {r!r}")
        st = self._locate(r)
        if st is None:
            return self._series_eval(r)
        return st.eval(r)

    def eval_component(self, r: float, i: int) -> float:
        st = self._locate(r)
        if st is None:
            return self._series_eval(r)[i]
        return st.eval_component(r, i)

    def u(self, r: float) -> float:
        return self.eval_component(r, 0)

    def du(self, r: float) -> float:
        return self.eval_component(r, 1)

    @property
    def states(self):
        """RadialState at every accepted step endpoint (plus the start)."""
        p = self.params
        out = [RadialState(self.steps[0].r0, self.steps[0].y0, p)] if self.steps else []
        for st in self.steps:
            out.append(RadialState(st.r0 + st.h, st.y1, p))
        return out

    @property
    def end_state(self) -> RadialState:
        return self.state_at(self.end_radius)

    def rescaled(self, scale: float, params: ProblemParams) -> "Trajectory":
        """Dilated trajectory x -> u(scale*x), valid for the given params.

        Radii divide by `scale`, slopes multiply by it; the lambda-weighted
        energy channels are dilation invariants.
        """
        z = scale

        def map_y(y):
            return (y[0], y[1] * z, y[2], y[3], y[4], y[5])

        def map_rc(rc):
            return tuple(
                tuple(c[i] * z if i == 1 else c[i] for i in range(_NCOMP))
                for c in rc
            )

        steps = [_Step(st.r0 / z, st.h / z, map_y(st.y0), map_y(st.y1),
                       map_rc(st.rcont)) for st in self.steps]
        zeros = [(r / z, sl * z) for r, sl in self.zeros]
        peaks = [(r / z, a) for r, a in self.peaks]
        lg, lgp, w0s = self._series
        lz = math.log(z)
        # g and g' pick up the z^2 from lambda -> lambda*z^2
        series = (lg + 2 * lz, lgp + 2 * lz, w0s)
        return Trajectory(params, self.initial_amplitude, self.r_start / z,
                          series, steps, zeros, peaks, self.end_radius / z)


def _f_ratio(u: float, p: ProblemParams) -> float:
    """f'(u)/f(u) = (1 + 2u^2 + alpha*beta*|u|^beta)/u (odd, ~1/u near 0)."""
    return (1.0 + 2.0 * u * u + p.alpha * p.beta * abs(u) ** p.beta) / u


def _dense_root(step: _Step, comp: int, lo: float, hi: float) -> float:
    """Root of dense component `comp` in theta in [lo, hi] (Illinois method)."""
    def g(th):
        c1, c2, c3, c4, c5 = step.rcont
        om = 1.0 - th
        return c1[comp] + th * (c2[comp] + om * (c3[comp] + th * (c4[comp] + om * c5[comp])))

    flo, fhi = g(lo), g(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NoSignChangeError(
            f"no sign change of component {comp} in theta bracket [{lo}, {hi}]"
        )
    side = 0
    for _ in range(200):
        th = (lo * fhi - hi * flo) / (fhi - flo)
        if not (lo < th < hi):
            th = 0.5 * (lo + hi)
        fm = g(th)
        if fm == 0.0 or (hi - lo) < 1e-16:
            return th
        if flo * fm < 0.0:
            hi, fhi = th, fm
            if side == -1:
                flo *= 0.5
            side = -1
        else:
            lo, flo = th, fm
            if side == 1:
                fhi *= 0.5
            side = 1
    return 0.5 * (lo + hi)


def integrate_radial(s: float, p: ProblemParams, stop,
                     settings: SolverSettings | None = None) -> Trajectory:
    """Integrate from u(0) = s > 0 until the stop rule fires.

    stop is a StopAfterZeros or StopAtRadius.  Raises ZeroNotReachedError
    if the radius cap is hit first, StiffnessError if the step collapses,
    and OverflowBudgetError (with the radius reached) from the scalar layer.
    """
    if not (s > 0.0):
        raise ValueError(f"amplitude must be positive, got {s!r}")
    if settings is None:
        settings = SolverSettings()
    if not isinstance(stop, (StopAfterZeros, StopAtRadius)):
        raise TypeError(f"unsupported stop rule {stop!r}")

    alpha, beta, loglam = p.alpha, p.beta, p.log_lambda
    budget = 700.0 if settings.precision == "double" else 709.7

    # ---- series start ---------------------------------------------------
    lg = log_abs_lambda_f(s, p)          # ln(lambda*f(s)); budget check below
    if lg > budget:
        raise OverflowBudgetError(lg, radius=0.0)
    lgp = lg + math.log(_f_ratio(s, p))  # ln(lambda*f'(s))
    log_gamma = -0.5 * (math.log(2.0) + loglam + 2.0 * math.log(s)
                        + s * s + alpha * s ** beta)
    r0 = min(1e-6, 1e-3 * math.exp(log_gamma)) if log_gamma < 0.0 else 1e-6
    lr0 = math.log(r0)

    def ex(v):
        return math.exp(v) if v > -745.0 else 0.0

    f_s = ex(lg - loglam)  # f(s), inside the budget whenever lambda <= 1
    w0s = primitive_F(s, p, precision=settings.precision) / f_s if f_s > 0.0 else 0.0

    u0 = s - ex(lg + 2 * lr0 - math.log(4.0)) + ex(lg + lgp + 4 * lr0 - math.log(64.0))
    du0 = -ex(lg + lr0 - math.log(2.0)) + ex(lg + lgp + 3 * lr0 - math.log(16.0))
    y = (
        u0,
        du0,
        ex(2 * lg + 4 * lr0 - math.log(16.0)),
        ex(lg + math.log(s) + 2 * lr0 - math.log(2.0)),
        -ex(2 * lg + 4 * lr0 - math.log(8.0)),
        ex(lg + 2 * lr0 - math.log(2.0)) - ex(lg + lgp + 4 * lr0 - math.log(16.0)),
    )

    # ---- right-hand side -------------------------------------------------

    def rhs(r, yy):
        u = yy[0]
        du = yy[1]
        if u == 0.0:
            lf = 0.0
        else:
            au = abs(u)
            expo = math.log(au) + u * u + alpha * au ** beta + loglam
            if expo > budget:
                raise OverflowBudgetError(expo, radius=r)
            lf = math.copysign(math.exp(expo), u) if expo > -745.0 else math.copysign(0.0, u)
        return (
            du,
            -du / r - lf,
            du * du * r,
            lf * u * r,
            lf * du * r * r,
            lf * r,
        )

    # ---- main loop --------------------------------------------------------
    rel, atol = settings.rel_tol, settings.abs_tol
    want_zeros = stop.n if isinstance(stop, StopAfterZeros) else None
    stop_radius = stop.radius if isinstance(stop, StopAtRadius) else None
    if stop_radius is not None and stop_radius <= r0:
        raise ValueError(f"stop radius {stop_radius!r} inside the series region")

    r = r0
    h = 0.01 * r0
    steps: list[_Step] = []
    zeros: list[tuple] = []
    peaks: list[tuple] = []
    last_zero_r = 0.0
    k1 = rhs(r, y)
    n_accept = 0
    end_radius = None

    while True:
        if settings.step_cap and abs(y[0]) > 0.9 * s and r > last_zero_r:
            h = min(h, 1e-3 * (r - last_zero_r))
        final_step = False
        if stop_radius is not None and r + h >= stop_radius:
            h = stop_radius - r
            final_step = True
        if h <= _MIN_STEP_FRACTION * r and not final_step:
            raise StiffnessError(r, h)

        # stages (unrolled linear combinations; this is the hot loop)
        rng = _RANGE
        ka = k1
        kb = rhs(r + 0.2 * h, tuple(y[j] + h * 0.2 * ka[j] for j in rng))
        kc = rhs(r + 0.3 * h, tuple(
            y[j] + h * (_A31 * ka[j] + _A32 * kb[j]) for j in rng))
        kd = rhs(r + 0.8 * h, tuple(
            y[j] + h * (_A41 * ka[j] + _A42 * kb[j] + _A43 * kc[j]) for j in rng))
        ke = rhs(r + _C4 * h, tuple(
            y[j] + h * (_A51 * ka[j] + _A52 * kb[j] + _A53 * kc[j] + _A54 * kd[j])
            for j in rng))
        kf = rhs(r + h, tuple(
            y[j] + h * (_A61 * ka[j] + _A62 * kb[j] + _A63 * kc[j]
                        + _A64 * kd[j] + _A65 * ke[j]) for j in rng))
        y1 = tuple(
            y[j] + h * (_A71 * ka[j] + _A73 * kc[j] + _A74 * kd[j]
                        + _A75 * ke[j] + _A76 * kf[j]) for j in rng)
        kg = rhs(r + h, y1)  # FSAL stage

        err = 0.0
        for j in rng:
            e = h * (_E1 * ka[j] + _E3 * kc[j] + _E4 * kd[j]
                     + _E5 * ke[j] + _E6 * kf[j] + _E7 * kg[j])
            sc = atol + rel * max(abs(y[j]), abs(y1[j]))
            q = abs(e) / sc
            if q > err:
                err = q
        if err <= 1.0:
            # accept: build dense coefficients
            ydiff = tuple(y1[j] - y[j] for j in rng)
            bspl = tuple(h * ka[j] - ydiff[j] for j in rng)
            rc4 = tuple(ydiff[j] - h * kg[j] - bspl[j] for j in rng)
            rc5 = tuple(
                h * (_D1 * ka[j] + _D3 * kc[j] + _D4 * kd[j]
                     + _D5 * ke[j] + _D6 * kf[j] + _D7 * kg[j])
                for j in rng
            )
            step = _Step(r, h, y, y1, (y, ydiff, bspl, rc4, rc5))
            steps.append(step)
            n_accept += 1

            events = []
            if (y[0] > 0.0) != (y1[0] > 0.0) or y1[0] == 0.0:
                th = _dense_root(step, 0, 0.0, 1.0)
                rz = r + th * h
                events.append(("zero", rz, step.eval_component(rz, 1)))
            if y[1] * y1[1] < 0.0:
                th = _dense_root(step, 1, 0.0, 1.0)
                rp = r + th * h
                events.append(("peak", rp, abs(step.eval_component(rp, 0))))
            events.sort(key=lambda ev: ev[1])
            done = False
            for kind, rx, aux in events:
                if kind == "zero":
                    zeros.append((rx, aux))
                    last_zero_r = rx
                    if want_zeros is not None and len(zeros) >= want_zeros:
                        end_radius = rx
                        done = True
                        break
                else:
                    peaks.append((rx, aux))
            if done:
                break

            r += h
            y = y1
            k1 = kg
            if final_step:
                end_radius = r
                break
            if err == 0.0:
                h *= 5.0
            else:
                h *= min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            h *= max(0.2, 0.9 * err ** -0.2)

        if r > settings.max_radius:
            raise ZeroNotReachedError(
                f"radius cap {settings.max_radius!r} reached with "
                f"{len(zeros)} zero(s) found",
                zeros_found=len(zeros), radius=r,
            )
        if n_accept > settings.max_steps:
            raise ZeroNotReachedError(
                f"step budget {settings.max_steps} exhausted at radius {r!r}",
                zeros_found=len(zeros), radius=r,
            )

    return Trajectory(p, s, r0, (lg, lgp, w0s), steps, zeros, peaks, end_radius)


def refine_zero(traj: Trajectory, bracket: tuple) -> tuple:
    """Polish a sign change of u inside one accepted step.

    Returns (radius, slope) from the dense interpolant.  Raises
    NoSignChangeError when u has the same sign at both bracket ends.
    """
    r_lo, r_hi = bracket
    if not (traj.r_start <= r_lo < r_hi):
        raise ValueError(f"bad bracket {bracket!r}")
    st = traj._locate(r_lo)
    st_hi = traj._locate(r_hi)
    if st is None or st_hi is not st:
        raise ValueError("bracket must lie within one accepted step")
    u_lo = st.eval_component(r_lo, 0)
    u_hi = st.eval_component(r_hi, 0)
    if u_lo * u_hi > 0.0:
        raise NoSignChangeError(f"u({r_lo!r})={u_lo!r} and u({r_hi!r})={u_hi!r} "
                                "have the same sign")
    th = _dense_root(st, 0, (r_lo - st.r0) / st.h, (r_hi - st.r0) / st.h)
    rz = st.r0 + th * st.h
    return rz, st.eval_component(rz, 1)


def first_integral_residual(traj: Trajectory) -> float:
    """max over accepted steps of |r*u'(r) + e_src(r)| (zero-flux identity)."""
    worst = 0.0
    for st in traj.steps:
        r1 = st.r0 + st.h
        res = abs(r1 * st.y1[1] + st.y1[5])
        if res > worst:
            worst = res
    return worst
