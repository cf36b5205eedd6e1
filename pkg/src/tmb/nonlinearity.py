"""Overflow-safe evaluation of the nonlinearity t*exp(t^2 + alpha*|t|^beta).

The growth is doubly exponential in the amplitudes of interest, so every
operation here budgets the exponent before exponentiating.  `scaled_lambda_f`
additionally folds the eigenparameter into the exponent so that a tiny
lambda cancels a huge exp(t^2) *before* any exp() call.

All functions are pure; the optional ``precision="extended"`` argument
routes the evaluation through mpmath with a wider exponent budget (used
only near the binary64 budget; binary64 covers the regimes of interest).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import OverflowBudgetError
from .quadrature import adaptive_quadrature

# Exponent budget for binary64 work (safety margin below log(DBL_MAX) ~ 709.78).
OVERFLOW_BUDGET = 700.0

# Budget for the extended backend: the *result* must still fit in a float.
EXTENDED_BUDGET = 709.7

_EXTENDED_DPS = 50


def _budget(precision: str) -> float:
    if precision == "double":
        return OVERFLOW_BUDGET
    if precision == "extended":
        return EXTENDED_BUDGET
    raise ValueError(f"unknown precision {precision!r} (expected 'double' or 'extended')")


@dataclass(frozen=True)
class ProblemParams:
    """The triple (alpha, beta, lambda) defining the equation.

    alpha > 0 is the perturbation strength, beta in (0, 2) the perturbation
    exponent, lam > 0 the eigenparameter.  log_lambda caches ln(lam).
    """

    alpha: float
    beta: float
    lam: float
    log_lambda: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not (self.alpha > 0.0):
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if not (0.0 < self.beta < 2.0):
            raise ValueError(f"beta must lie in (0, 2), got {self.beta!r}")
        if not (self.lam > 0.0):
            raise ValueError(f"lambda must be positive, got {self.lam!r}")
        log_lam = math.log(self.lam)
        if self.log_lambda is None:
            object.__setattr__(self, "log_lambda", log_lam)
        elif abs(self.log_lambda - log_lam) > 1e-12 * max(1.0, abs(log_lam)):
            raise ValueError(
                f"log_lambda={self.log_lambda!r} inconsistent with lambda={self.lam!r}"
            )

    def with_lambda(self, lam: float) -> "ProblemParams":
        """Same (alpha, beta) with a different eigenparameter."""
        return ProblemParams(self.alpha, self.beta, lam)


def exponent(t: float, p: ProblemParams) -> float:
    """t^2 + alpha*|t|^beta.  Defined as 0 at t=0 (no 0^(beta-1) is evaluated)."""
    if t == 0.0:
        return 0.0
    return t * t + p.alpha * abs(t) ** p.beta


def nonlinearity_f(t: float, p: ProblemParams, precision: str = "double") -> float:
    """t * exp(t^2 + alpha*|t|^beta); odd in t.

    Raises OverflowBudgetError when t^2 + alpha|t|^beta + ln|t| exceeds the
    budget; callers in that regime must use scaled_lambda_f instead.
    """
    if t == 0.0:
        return 0.0
    at = abs(t)
    expo = t * t + p.alpha * at ** p.beta
    total = expo + math.log(at)
    if total > _budget(precision):
        raise OverflowBudgetError(total)
    if precision == "extended":
        import mpmath as mp

        with mp.workdps(_EXTENDED_DPS):
            return float(mp.mpf(t) * mp.e ** mp.mpf(expo))
    return t * math.exp(expo)


def nonlinearity_f_prime(t: float, p: ProblemParams, precision: str = "double") -> float:
    """d/dt of nonlinearity_f: exp(t^2+alpha|t|^beta) * (1 + 2t^2 + alpha*beta*|t|^beta).

    Even in t, continuous at t=0 with value 1.
    """
    if t == 0.0:
        return 1.0
    at = abs(t)
    pow_term = p.alpha * at ** p.beta
    expo = t * t + pow_term
    total = expo + math.log(at)
    if total > _budget(precision):
        raise OverflowBudgetError(total)
    poly = 1.0 + 2.0 * t * t + p.beta * pow_term
    # The polynomial factor can push the result past the budget even when
    # the f-budget check passes (large alpha, |t| < 1).
    final = expo + math.log(poly)
    if final > _budget(precision):
        raise OverflowBudgetError(final)
    if precision == "extended":
        import mpmath as mp

        with mp.workdps(_EXTENDED_DPS):
            return float(mp.e ** mp.mpf(expo) * mp.mpf(poly))
    return math.exp(expo) * poly


def scaled_lambda_f(t: float, p: ProblemParams, precision: str = "double") -> float:
    """lambda * nonlinearity_f(t), evaluated as sign(t)*exp(ln|t| + t^2 + alpha|t|^beta + ln lambda).

    Representable in regimes where the naive product lambda*f(t) overflows
    (tiny lambda against huge exp(t^2)) or underflows.
    """
    if t == 0.0:
        return 0.0
    at = abs(t)
    combined = math.log(at) + t * t + p.alpha * at ** p.beta + p.log_lambda
    if combined > _budget(precision):
        raise OverflowBudgetError(combined)
    if combined < -745.0:
        return math.copysign(0.0, t)
    if precision == "extended":
        import mpmath as mp

        with mp.workdps(_EXTENDED_DPS):
            return float(mp.sign(t) * mp.e ** mp.mpf(combined))
    return math.copysign(math.exp(combined), t)


def log_abs_lambda_f(t: float, p: ProblemParams) -> float:
    """ln(lambda*|f(t)|) without exponentiating; t must be nonzero."""
    at = abs(t)
    return math.log(at) + t * t + p.alpha * at ** p.beta + p.log_lambda


def primitive_F(t: float, p: ProblemParams, precision: str = "double",
                rel_tol: float = 1e-10) -> float:
    """Integral of s*exp(s^2 + alpha*s^beta) over s in [0, |t|]; even in t.

    Adaptive quadrature to relative tolerance 1e-10 (bisection, max depth 40).
    """
    if t == 0.0:
        return 0.0
    at = abs(t)
    if not math.isfinite(at):
        raise ValueError(f"t must be finite, got {t!r}")
    # Budget the integrand peak (at s = |t|), same form as nonlinearity_f.
    total = at * at + p.alpha * at ** p.beta + math.log(at)
    if total > _budget(precision):
        raise OverflowBudgetError(total)
    if precision == "extended":
        import mpmath as mp

        with mp.workdps(_EXTENDED_DPS):
            val = mp.quad(lambda s: s * mp.e ** (s * s + p.alpha * abs(s) ** p.beta),
                          [0, at])
            return float(val)

    alpha, beta = p.alpha, p.beta

    def integrand(s: float) -> float:
        return s * math.exp(s * s + alpha * s ** beta)

    return adaptive_quadrature(integrand, 0.0, at, rel_tol=rel_tol)


def f_over_t(t: float, p: ProblemParams) -> float:
    """f(t)/t = exp(t^2 + alpha|t|^beta); even, equals 1 at t=0.

    Continuous through zeros of the solution, unlike the literal quotient.
    """
    if t == 0.0:
        return 1.0
    expo = t * t + p.alpha * abs(t) ** p.beta
    if expo > EXTENDED_BUDGET:
        raise OverflowBudgetError(expo)
    return math.exp(expo)
