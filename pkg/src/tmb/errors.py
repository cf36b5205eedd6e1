"""Exception types shared across the package."""


class TmbError(Exception):
    """Base class for all package-specific errors."""


class OverflowBudgetError(TmbError, OverflowError):
    """An exponent exceeded the working-precision overflow budget.

    Carries the offending exponent (and the radius reached, when raised
    from inside an integration).
    """

    def __init__(self, exponent, radius=None, message=None):
        self.exponent = exponent
        self.radius = radius
        if message is None:
            message = f"exponent {exponent:.3f} exceeds the overflow budget"
            if radius is not None:
                message += f" (at radius {radius!r})"
        super().__init__(message)


class QuadratureFailureError(TmbError, RuntimeError):
    """Adaptive quadrature could not meet its tolerance within budget."""


class StiffnessError(TmbError, RuntimeError):
    """Integrator step size collapsed below the resolvable scale."""

    def __init__(self, radius, step):
        self.radius = radius
        self.step = step
        super().__init__(f"step size {step!r} below resolvable scale at radius {radius!r}")


class NoSignChangeError(TmbError, ValueError):
    """A root-refinement bracket does not actually bracket a sign change."""


class ZeroNotReachedError(TmbError, RuntimeError):
    """Integration hit the radius cap or overflow before the requested zero."""

    def __init__(self, message, zeros_found=0, radius=None):
        self.zeros_found = zeros_found
        self.radius = radius
        super().__init__(message)


class NoSolutionInRangeError(TmbError, RuntimeError):
    """The amplitude scan found no branch hitting the target eigenvalue."""

    def __init__(self, target, lam_min, lam_max, s_min, s_max):
        self.target = target
        self.lam_range = (lam_min, lam_max)
        self.s_range = (s_min, s_max)
        super().__init__(
            f"no solution with lambda={target!r} in scanned range "
            f"lambda in [{lam_min:.6g}, {lam_max:.6g}] "
            f"(amplitudes s in [{s_min:.6g}, {s_max:.6g}])"
        )


class WindowTooLargeError(TmbError, ValueError):
    """A rescaled profile window leaves the nodal domain."""


class FamilyEmptyError(TmbError, RuntimeError):
    """Every member of a parameter family failed to solve."""


class ConfigError(TmbError, ValueError):
    """An experiment configuration is malformed.

    `field` names the offending key; `location` is a human-readable
    position hint (file/section/line).
    """

    def __init__(self, message, field=None, location=None):
        self.field = field
        self.location = location
        parts = [message]
        if field is not None:
            parts.append(f"field: {field}")
        if location is not None:
            parts.append(f"at: {location}")
        super().__init__(" | ".join(parts))
