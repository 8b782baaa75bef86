"""Exception and warning types shared across the package."""


class EmptyEligibleSet(RuntimeError):
    """No letter satisfies the admissibility bound at some step.

    Can only happen when C' < 1 - 1/d; with a valid lower box bound some
    coordinate sum argument always leaves at least one admissible letter.
    """

    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"no admissible letter at step {step}")


class OutOfDomain(ValueError):
    """A point fell outside the domain of the requested classification."""

    def __init__(self, message, step=None):
        self.step = step
        super().__init__(message)


class BoundViolation(RuntimeError):
    """Orbit left the guaranteed box although its preconditions held.

    Indicates a numerical-tolerance bug rather than a parameter problem.
    """


class UnsupportedDimension(ValueError):
    """Exact polygonal construction requested for an unsupported alphabet size."""


class NoConvergence(RuntimeError):
    """Partition refinement stopped before covering the target area."""

    def __init__(self, achieved_area, iterations, message=None):
        self.achieved_area = achieved_area
        self.iterations = iterations
        super().__init__(
            message
            or f"refinement covered area {achieved_area:.12f} after {iterations} iterations"
        )


class DegenerateFit(ValueError):
    """Too few data points for a meaningful growth-exponent fit."""


class SaturationWarning(UserWarning):
    """The analysed prefix is too short to trust the largest factor counts."""


class DegeneracyWarning(UserWarning):
    """A line arrangement contains parallel or concurrent lines."""
