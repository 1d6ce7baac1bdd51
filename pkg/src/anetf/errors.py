"""Exception hierarchy shared by all modules."""


class ANEError(Exception):
    """Base class for every error raised by :mod:`anetf`."""


class ScenarioError(ANEError):
    """A scenario failed validation.

    ``problems`` holds every violation found, not just the first one.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.problems))


class PathEvaluationError(ANEError):
    """An acoustic path cannot be evaluated at the requested point."""


class PoleProximityError(ANEError):
    """Evaluation point lies on a pole of an auxiliary function."""

    def __init__(self, z, omega):
        self.z = z
        self.omega = omega
        super().__init__(f"z={z!r} within pole guard of e^(+-i*{omega:.12g})")


class NearSingularError(ANEError):
    """Gaussian elimination met a pivot below the singularity threshold."""

    def __init__(self, step, pivot, norm):
        self.step = step
        self.pivot = pivot
        self.norm = norm
        super().__init__(
            f"matrix singular to working precision at elimination step {step}: "
            f"|pivot|={pivot:.3e}, ||M||inf={norm:.3e}"
        )


class DivergenceError(ANEError):
    """Adaptive coefficients blew up during simulation.

    The partial trace up to the offending sample is kept on ``trace``.
    """

    def __init__(self, tone, actuator, sample, trace=None):
        self.tone = tone
        self.actuator = actuator
        self.sample = sample
        self.trace = trace
        super().__init__(
            f"coefficients diverged at tone l={tone}, actuator j={actuator}, sample n={sample}"
        )
