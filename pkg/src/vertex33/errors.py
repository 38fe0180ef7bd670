"""Exception hierarchy.

Failures that are data (a constraint residual, a relation that does not
hold) are returned in reports. Exceptions are reserved for inputs that
make an operation meaningless.
"""


class Vertex33Error(Exception):
    """Base class for every error raised by the package."""

    exit_code = 2


class InputError(Vertex33Error):
    """Malformed model or catalog document."""


class PatternViolation(Vertex33Error):
    def __init__(self, positions):
        self.positions = list(positions)
        where = ", ".join(f"({i},{j})" for i, j in self.positions)
        super().__init__(f"nonzero entries outside the 33-vertex pattern at {where}")


class ConstraintsNotSatisfied(Vertex33Error):
    # a well-formed model that fails the solvability check is a check failure
    exit_code = 1

    def __init__(self, report):
        self.report = report
        bad = ", ".join(report.failed_relations())
        super().__init__(f"solvability constraints violated: {bad}")


class InvalidParameters(Vertex33Error):
    pass


class DimensionCapExceeded(Vertex33Error):
    pass


class NumericalDegeneracy(Vertex33Error):
    """Raised when a computation hits a singular or degenerate point."""

    exit_code = 3


class EigenNonConvergence(NumericalDegeneracy):
    pass


class ZeroHopping(NumericalDegeneracy):
    pass


class BothHoppingsZero(NumericalDegeneracy):
    pass


class NotProportional(NumericalDegeneracy):
    pass


class DegenerateTau(NumericalDegeneracy):
    pass


class DegenerateX(NumericalDegeneracy):
    pass


class SingularG(NumericalDegeneracy):
    pass


class SingularLambda(NumericalDegeneracy):
    def __init__(self, message, det=None, rcond=None):
        self.det = det
        self.rcond = rcond
        super().__init__(message)


class ZeroRapidity(NumericalDegeneracy):
    pass


class DegenerateChangeOfVariable(NumericalDegeneracy):
    pass


class NoConvergence(NumericalDegeneracy):
    pass


class BranchCollision(NumericalDegeneracy):
    pass
