"""Exception types shared across the package."""


class ZetamomError(Exception):
    """Base class for all package-specific errors."""


# zeta evaluation
class PoleAtOne(ZetamomError):
    """zeta requested at (or within 1e-12 of) its pole s = 1."""


class HeightOutOfRange(ZetamomError):
    """|Im s| exceeds the supported evaluation range."""


class HeightTooLow(ZetamomError):
    """Riemann-Siegel path requested below its validity height."""


class GammaPole(ZetamomError):
    """Argument too close to a pole of a Gamma factor."""


class ShiftTooLarge(ZetamomError):
    """Imaginary shift too large relative to the height t."""


class DegenerateShifts(ZetamomError):
    """A pole-cancelling kernel factor was requested with alpha_i + alpha_j = 0."""


class QuadratureNotConverged(ZetamomError):
    """Doubling the node count moved the result by more than the tolerance."""


class TruncationTooShort(ZetamomError):
    """Certified kernel-decay tail bound exceeds the allowed tolerance."""


# prime machinery
class LimitTooLarge(ZetamomError):
    """Sieve limit above the supported maximum."""


class DegenerateSchedule(ZetamomError):
    """Block schedule has no blocks for the requested parameters."""


class RangeBeyondTable(ZetamomError):
    """Prime-sum range extends beyond the sieved table."""


class FactorizationIncomplete(ZetamomError):
    """A cofactor larger than table.limit**2 survived trial division."""


class DenominatorVanishes(ZetamomError):
    """Closed-form denominator of a B coefficient is numerically zero."""


# Dirichlet polynomials
class BlockOutOfRange(ZetamomError):
    """Block index outside 1..ell."""


class SupportOverflow(ZetamomError):
    """Sparse convolution support exceeded the configured budget."""


class LengthExceedsWindow(ZetamomError):
    """Polynomial length too large for the averaging window."""


class BlocksNotDisjoint(ZetamomError):
    """Dirichlet polynomials do not live on disjoint prime blocks."""


# moment estimation
class QuadratureUnstable(ZetamomError):
    """Halving the quadrature step moved the result by more than the tolerance."""


class DegenerateFit(ZetamomError):
    """Ladder abscissae are numerically collinear-degenerate."""


# main terms
class PoleProximity(ZetamomError):
    """A contour node combination came too close to a zeta pole."""


class StepTooCoarse(ZetamomError):
    """Halving the integration step moved the result by more than the tolerance."""
