"""Exception types raised by the engine."""

from .quadrature import QuadratureNotConverged


class DomainError(ValueError):
    """A position or time lies outside the region where a formula holds."""


class NonConvergence(RuntimeError):
    """Newton iteration for a pole did not converge."""

    def __init__(self, index, last_iterate, message=None):
        self.index = index
        self.last_iterate = last_iterate
        super().__init__(message or
                         f"pole n={index} did not converge (last iterate {last_iterate!r})")


class MissedPole(RuntimeError):
    """Argument-principle audit disagrees with the poles found by Newton."""


class DegenerateNorm(ArithmeticError):
    """Normalization integral of a resonant state is numerically zero."""


class DegenerateState(ValueError):
    """Two-particle entangled state with identical orbitals."""


class TruncationCapReached(RuntimeError):
    """No truncation below the cap meets the strength tolerance."""

    def __init__(self, cap, deficit):
        self.cap = cap
        self.deficit = deficit
        super().__init__(f"strength deficit {deficit:.3e} still above tolerance at N={cap}")


class WindowTooShort(ValueError):
    """Tail-fit window spans less than one decade of time."""


__all__ = [
    "DomainError",
    "NonConvergence",
    "MissedPole",
    "DegenerateNorm",
    "DegenerateState",
    "TruncationCapReached",
    "WindowTooShort",
    "QuadratureNotConverged",
]
