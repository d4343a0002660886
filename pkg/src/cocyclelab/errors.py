"""Exception hierarchy shared by all cocyclelab modules."""


class CocycleLabError(Exception):
    """Base class for every error raised by this package."""


# --- arithmetic ---

class RationalInput(CocycleLabError):
    """An exact rational was supplied where an irrational is required."""


class PrecisionExhausted(CocycleLabError):
    """Too few continued-fraction quotients are certified at the input precision."""


class InsufficientDepth(CocycleLabError):
    """A Frequency does not carry enough convergents for the request."""


# --- trig maps and group checks ---

class GroupViolation(CocycleLabError):
    """A matrix (family) failed its structure-group residual check."""


class GridTooCoarse(CocycleLabError):
    """Sample grid too small (or not a power of two) for the requested fit."""


class BadStrip(CocycleLabError):
    """Strip parameters are inconsistent (need h' < h)."""


# --- dynamics ---

class Degenerate(CocycleLabError):
    """A matrix evaluation was singular to working precision."""


class NoAffineWindow(CocycleLabError):
    """No strip window with affine L^k(y) found within the sample budget."""


class NotUH(CocycleLabError):
    """Operation requires a uniformly hyperbolic cocycle."""


class NotDominated(CocycleLabError):
    """Operation requires a dominated splitting at the requested index."""


# --- topology ---

class NonzeroDegree(CocycleLabError):
    """Rotation number requires a degree-zero (homotopic-to-identity) cocycle."""


class SingularOnGrid(CocycleLabError):
    """Map is singular (to tolerance) somewhere on the evaluation grid."""


class AlignmentLost(CocycleLabError):
    """Continuity alignment of frames dropped below the overlap threshold."""


class GridMismatch(CocycleLabError):
    """Two frame grids do not share the same phase grid."""


# --- splittings and conjugacies ---

class DegenerateForm(CocycleLabError):
    """Symplectic pairing restricted to a subspace is numerically degenerate."""


class DegeneratePairing(CocycleLabError):
    """Cross pairing of two isotropic bundles is not invertible on the grid."""


class TauMismatch(CocycleLabError):
    """Unstable and stable bundles carry different monodromy signs."""


class ResidualTooLarge(CocycleLabError):
    """A constructed conjugacy failed its residual certificate."""


class OrientationReversing(CocycleLabError):
    """Cocycle reverses orientation on the unstable bundle; the positive
    scalar factorization of the block form does not exist."""


# --- Hermitian families ---

class DegenerateUnresolved(CocycleLabError):
    """Eigenvalue branches could not be separated within the refinement budget."""


class NotInvertible(CocycleLabError):
    """Hermitian family has an eigenvalue too close to zero."""


class RankDeficient(CocycleLabError):
    """Frame vectors are linearly dependent to working precision."""


class NonzeroSignature(CocycleLabError):
    """A center-space Krein form has nonzero signature; no canonical basis."""


# --- experiments ---

class NoRegularDirection(CocycleLabError):
    """Perturbation probe requires at least one vanishing acceleration."""


class ReducibilityFailed(CocycleLabError):
    """Bounded-degree residual minimization stalled above tolerance."""


# --- cli ---

class ParseError(CocycleLabError):
    """Input file failed to parse or validate."""


class CheckFailure(CocycleLabError):
    """A requested check ran but did not pass."""
