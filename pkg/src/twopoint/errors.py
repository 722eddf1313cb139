"""Exception hierarchy shared by all toolkit modules."""


class TwoPointError(Exception):
    """Base class for all toolkit errors."""


class PoleAtPoint(TwoPointError):
    """Evaluation point is within tolerance of a pole."""


class CriticalPoint(TwoPointError):
    """Derivative vanishes (within tolerance) where it must not."""


class DegenerateEquation(TwoPointError):
    """Preimage equation is identically zero."""


class CoincidentPoints(TwoPointError):
    """Two disk points coincide where a distinct pair is required."""


class CoincidentImages(TwoPointError):
    """The two image points coincide where distinct values are required."""


class DegeneratePair(TwoPointError):
    """Curve family anchors coincide."""


class ZeroParameter(TwoPointError):
    """Family parameter t = 0 is excluded."""


class ParameterOutOfRange(TwoPointError):
    """Scalar parameter outside its admissible interval."""


class DuplicatePoints(TwoPointError):
    """Point list contains (numerically) repeated entries."""


class UnsupportedDomain(TwoPointError):
    """Domain kind has no closed form for the requested quantity."""


class PlateOverlap(TwoPointError):
    """Condenser plates intersect each other."""


class PlateOutsideDomain(TwoPointError):
    """A condenser plate is not strictly inside the domain."""


class PlateOnAxis(TwoPointError):
    """A plate touches the symmetrization axis of the sector split."""


class GridTooCoarse(TwoPointError):
    """Finite-difference grid cannot resolve a plate (radius < 3 cells)."""


class RadiusTooLarge(TwoPointError):
    """Plate radius too large for the small-radius expansion."""


class BudgetExhausted(TwoPointError):
    """Monte-Carlo budget spent without reaching the requested tolerance."""


class ContinuationFailed(TwoPointError):
    """Local preimage continuation lost its branch."""


class RootRefinementFailed(TwoPointError):
    """Polynomial root could not be polished to the required residual."""
