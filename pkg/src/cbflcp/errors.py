"""Exception types raised across the package."""


class SafeControlError(Exception):
    """Base class for all errors raised by cbflcp."""


class DimensionMismatch(SafeControlError, ValueError):
    pass


class DegenerateRow(SafeControlError, ValueError):
    """A constraint row has (numerically) zero norm."""

    def __init__(self, index, norm=0.0):
        self.index = index
        self.norm = norm
        super().__init__(f"row {index} is degenerate (norm {norm:.3e})")


class SingularSystem(SafeControlError, ArithmeticError):
    pass


class PointOffLink(SafeControlError, ValueError):
    pass


class DegenerateNormal(SafeControlError, ValueError):
    """Obstacle center lies on the link segment, so no normal is defined."""


class IterationLimit(SafeControlError, RuntimeError):
    pass


class PivotBreakdown(SafeControlError, RuntimeError):
    pass


class TooManyConstraints(SafeControlError, ValueError):
    pass


class SingularJacobian(SafeControlError, ArithmeticError):
    pass


class SolverFailure(SafeControlError, RuntimeError):
    """A safety controller reported no admissible input."""


class SceneError(SafeControlError, ValueError):
    """Invalid scene/config file. ``field`` names the offending key."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
