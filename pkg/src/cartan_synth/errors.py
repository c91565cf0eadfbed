"""Exception types raised across the package."""


class CartanSynthError(Exception):
    """Base class for all package errors."""


# --- matrix kernel -----------------------------------------------------------

class NotNormal(CartanSynthError):
    """Input matrix does not commute with its adjoint within tolerance."""


class NotUnitary(CartanSynthError):
    """Input matrix is not unitary within tolerance."""


class NotSymmetric(CartanSynthError):
    """Input matrix is not (real) symmetric within tolerance."""


class NotSkewHermitian(CartanSynthError):
    """Input matrix is not skew-Hermitian within tolerance."""


class NotCommuting(CartanSynthError):
    """Input matrices do not commute within tolerance."""


class NoConvergence(CartanSynthError):
    """Underlying eigensolver iteration failed to converge."""


class BranchAmbiguity(CartanSynthError):
    """An eigenphase lies within tolerance of the branch cut at pi."""


# --- involutions / schemes ---------------------------------------------------

class BadParams(CartanSynthError):
    """Invalid parameters for a standard decomposition."""


class BadLocalChoice(CartanSynthError):
    """A per-subsystem decomposition choice is inconsistent with its dimension."""


class ScheduleExhausted(CartanSynthError):
    """No fresh block-index pair is available for the next recursion round."""


class FactorizationFailed(CartanSynthError):
    """A matrix factorization did not satisfy its contract."""


# --- grading -----------------------------------------------------------------

class NonCommutingInvolutions(CartanSynthError):
    """Two involutions do not commute as linear maps, so no joint grading exists."""


class DimensionMismatch(CartanSynthError):
    """Grading block dimensions do not sum to the ambient dimension."""


class CartanRelationViolated(CartanSynthError):
    """A recursion level violates the subalgebra/complement commutation relations."""


class NotASubalgebra(CartanSynthError):
    """Subspace is not closed under the commutator within tolerance."""


# --- KAK solvers -------------------------------------------------------------

class RealityViolated(CartanSynthError):
    """An orthogonal factor came out with a non-real residual."""


class PairingFailed(CartanSynthError):
    """Eigenvalue pairing required by the symplectic structure could not be built."""


class GluingFailed(CartanSynthError):
    """Cosine-sine block gluing failed on a degenerate singular cluster."""


class BlockSingular(CartanSynthError):
    """A block that must be inverted is singular within tolerance."""


class UnsupportedScheme(CartanSynthError):
    """No catalogued formula exists for the requested scheme/level."""


# --- synthesis ---------------------------------------------------------------

class LogOutsideSubspace(CartanSynthError):
    """A leaf's principal logarithm has mass outside its labeled subspace."""
