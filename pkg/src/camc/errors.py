"""Exception types shared across the package."""


class CamcError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CamcError):
    """A normal component nu3 left the domain of the energy density."""


class ConvexityError(CamcError):
    """The energy density is not convex where it was evaluated."""


class NoRealRoot(CamcError):
    """The level-set quadratic has no real solution at this eta1."""


class DegenerateEquation(CamcError):
    """The level-set equation degenerates (no eta2 dependence left)."""


class EmptyDomain(CamcError):
    """The admissible eta1 set of the level-set equation is empty."""


class SingularTurning(CamcError):
    """The turning-rate denominator vanished; the trace cannot continue."""


class NoRoot(CamcError):
    """No slope root found in the search range."""


class BranchLost(CamcError):
    """Root continuation lost its branch (roots merged or vanished)."""


class WaistError(CamcError):
    """Evaluation at or inside the catenoid waist."""


class BranchCutError(CamcError):
    """Evaluation on the branch cut of a multivalued conjugate graph."""


class HypothesisError(CamcError):
    """A structural hypothesis (e.g. rotational invariance) fails."""


class DegenerateStencil(CamcError):
    """A vertex stencil is too degenerate for a variational estimate."""


class DegenerateFace(CamcError):
    """A face with (near) zero area was produced or encountered."""
