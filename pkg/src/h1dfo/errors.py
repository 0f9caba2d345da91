"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands have inconsistent dimensions."""


class DuplicatePointsError(ValueError):
    """Interpolation points closer than the distinctness tolerance."""


class NotPoisedError(RuntimeError):
    """Interpolation geometry too degenerate for the requested solve."""


class InconsistentDataError(RuntimeError):
    """Interpolation data admits no quadratic interpolant."""


class GeometryFailureError(RuntimeError):
    """No interpolation point can be replaced without losing solvability."""
