"""Exception hierarchy shared by all billspec modules."""


class BillspecError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpec(BillspecError):
    """A domain specification contains non-finite or malformed data."""


class Nonconvex(BillspecError):
    """The requested boundary fails the strict convexity inequality."""


class ConvexityLost(Nonconvex):
    """A deformation pushed the boundary out of the convex class."""


class GlancingRay(BillspecError):
    """Phase point too close to the glancing set theta in {0, pi}."""


class RootFindFailure(BillspecError):
    """The chord intersection solver did not converge."""


class NotPeriodic(BillspecError):
    """Configuration is not a critical point of the length functional."""


class CoincidentPoints(BillspecError):
    """Two consecutive reflection points collide."""


class UnsupportedPeriod(BillspecError):
    """Operation not defined for this period (q = 2 Hessians)."""


class MaxIterations(BillspecError):
    """Iterative solver hit its iteration budget without converging."""


class WrongWinding(BillspecError):
    """Solver converged to an orbit of a different rotation class."""


class RankMismatch(BillspecError):
    """Hessian rank differs from what the operation requires."""


class DegenerateConstraint(BillspecError):
    """Requested perturbation weights cannot realize a nonzero c_gamma."""


class DegenerateFit(BillspecError):
    """Fitted slope statistically indistinguishable from zero."""


class NoBranch(BillspecError):
    """No local branch of the loop function at the requested base point."""


class SingularHessian(BillspecError):
    """Stationary-phase model has a singular Hessian."""


class ResourceLimit(BillspecError):
    """Requested order exceeds the configured combinatorial bound."""


class DiagonalSingularity(BillspecError):
    """Kernel evaluation requested below the chord cutoff."""


class ResolutionTooLow(BillspecError):
    """Quadrature grid does not resolve the phase oscillation."""


class DegenerateOrbit(BillspecError):
    """Operation requires a nondegenerate orbit."""
