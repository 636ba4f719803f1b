"""Exception hierarchy shared by all qwsearch modules."""


class QWSearchError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(QWSearchError, ValueError):
    """A numeric construction parameter is outside its supported range."""


class InvalidInput(QWSearchError, ValueError):
    """Structurally bad input data (edge lists, vertex ids, mismatched states)."""


class NotAnEdge(InvalidInput):
    pass


class NotAClique(InvalidInput):
    pass


class DegreeMismatch(InvalidInput):
    pass


class PartitionError(InvalidInput):
    """A declared partition of the marked set is invalid.

    ``group`` holds the offending group (or ``None`` when the problem is global,
    e.g. the groups do not cover the marked set).
    """

    def __init__(self, message, group=None):
        super().__init__(message)
        self.group = group


class TooLarge(QWSearchError, ValueError):
    def __init__(self, size, cap):
        super().__init__(f"marked set of size {size} exceeds search cap {cap}")
        self.size = size
        self.cap = cap


class Infeasible(QWSearchError):
    """The correction-weight linear system has no exact solution."""

    def __init__(self, residual):
        super().__init__(f"correction-weight system is infeasible (residual {residual:.3e})")
        self.residual = residual


class NumericalViolation(QWSearchError):
    """A physics invariant (e.g. norm preservation) drifted beyond tolerance."""
