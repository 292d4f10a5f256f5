"""Exception hierarchy shared by all modules."""


class SemicompError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(SemicompError, ValueError):
    """Input does not describe a valid geometric configuration."""


class AntipodalOrCut(GeometryError):
    """No unique model geodesic joins the two points."""


class FlatSpace(GeometryError):
    pass


class BranchOutOfRange(GeometryError):
    """Law-of-cosines inversion left the principal branch."""


class ZeroTriple(GeometryError):
    pass


class SizeBoundViolation(GeometryError):
    pass


class RealizationError(GeometryError):
    """Side data cannot be placed in the selected model plane."""


class DegenerateSection(GeometryError):
    """The 2-plane is null (degenerate); sectional curvature is undefined."""


class DegenerateInput(GeometryError):
    pass


class NullConic(DegenerateSection):
    pass


class NotDiagonalizable(GeometryError):
    pass


class DegenerateInterval(GeometryError):
    pass


class NumericalFailure(SemicompError, RuntimeError):
    """Base class for failures of an iterative or integrating routine."""


class DomainMargin(NumericalFailure):
    """Point too close to the chart boundary for finite differencing."""


class LeftDomain(NumericalFailure):
    """An integrated curve left the chart domain."""


class NoConvergence(NumericalFailure):
    pass


class ConjugatePoint(NumericalFailure):
    pass


class ZeroDenominator(NumericalFailure):
    pass
