"""Exception types shared across the package.

Validation problems (bad arguments, violated invariants) raise plain
``ValueError``.  Failures that occur *during* a computation derive from
``NumericalFailure`` so callers (and the CLI) can distinguish the two.
"""


class NumericalFailure(Exception):
    """Base class for runtime numerical failures."""


class SpectrumHit(NumericalFailure):
    """The requested point lies (numerically) on the Dirichlet spectrum,
    where the boundary value problem is not uniquely solvable."""


class WindowTooSmall(NumericalFailure):
    """A real-axis root scan hit the lower edge with unresolved sign
    behaviour; enlarge the window."""


class NearSingular(NumericalFailure):
    """A linear system was too ill-conditioned to trust (condition
    estimate above 1e12)."""


class EigenFailure(NumericalFailure):
    """The dense eigensolver did not converge."""


class NotInvertible(NumericalFailure):
    """A matrix that must be invertible is numerically singular."""


class MisalignedDelay(NumericalFailure):
    """A delay is not an integer multiple of the time step."""


class OutsideHalfplane(NumericalFailure):
    """Evaluation point lies outside the half-plane of convergence of the
    kernel's Laplace transform."""
