"""Exception types shared across the package."""


class TorusQuantError(Exception):
    """Base class for all domain errors raised by this package."""


class NotSkew(TorusQuantError):
    """Matrix expected to be skew-symmetric is not."""


class SingularForm(TorusQuantError):
    """Integer skew form has determinant zero."""


class DegenerateDenominator(TorusQuantError):
    """Moebius denominator block is numerically singular."""


class ChartMismatch(TorusQuantError):
    """Operands live on different brane charts."""


class NotInStabilizer(TorusQuantError):
    """Integer matrix does not preserve the chart's skew form."""


class IndexOutOfRange(TorusQuantError):
    """Theta basis label outside the residue index set."""


class QuadratureUnderflow(TorusQuantError):
    """Requested quadrature resolution is too coarse."""


class TruncationTooSmall(TorusQuantError):
    """Lattice series truncation gives an estimated tail above tolerance."""


class PointMismatch(TorusQuantError):
    """Quantum states attached to incompatible frames or points."""


class BandUnknown(TorusQuantError):
    """Symbol reconstruction requires the stored mode band."""


class DegreeOverflow(TorusQuantError):
    """Mirror section polynomial degree exceeded its cap."""


class NotClosed(TorusQuantError):
    """One-form expected to be closed has nonzero differential."""


class NotExactOnDomain(TorusQuantError):
    """Closed form admits no polynomial primitive on the chart domain."""


class MissingOverlap(TorusQuantError):
    """Atlas composition references an overlap without sample points."""


class FormatError(TorusQuantError):
    """JSON payload does not match the expected wire format."""


class UnknownExample(TorusQuantError):
    """No built-in geometry with the requested name."""


class UnknownSelector(TorusQuantError):
    """Requested suite or subcommand selector does not exist."""
