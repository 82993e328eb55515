"""Initial states, resonant basis sets and expansion coefficients C_n, Cbar_n.

For an initial state psi on [0, a]

    C_n    = int_0^a psi(r)       u_n(r) dr
    Cbar_n = int_0^a conj(psi(r)) u_n(r) dr

and the mirror poles follow by conjugation: C_{-n} = conj(Cbar_n),
Cbar_{-n} = conj(C_n).  The strengths Re(C_n Cbar_n) sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .delta_shell import PoleSet, ResonantState, ShellPotential, find_poles, norm_constants
from .errors import DomainError, QuadratureNotConverged, TruncationCapReached
from .quadrature import gauss_legendre

NORM_TOL = 1e-10
DEFAULT_TRUNCATION_CAP = 500


def _sin_over(q, a):
    """sin(q a) / q, continuous at q = 0 for complex q."""
    q = np.asarray(q, dtype=complex)
    x = q * a
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, q)
    series = a * (1 - x * x / 6 + x**4 / 120)
    return np.where(small, series, np.sin(x) / safe)


@dataclass(frozen=True)
class InitialState:
    """One-particle state confined to [0, a].

    Build with :meth:`box` (infinite-well eigenstate) or :meth:`tabulated`.
    """

    kind: str
    a: float
    alpha: int | None = None
    spline: tuple | None = field(default=None, repr=False)
    scale: float = 1.0

    @classmethod
    def box(cls, alpha: int, a: float = 1.0) -> "InitialState":
        """sqrt(2/a) sin(alpha pi r / a)."""
        if int(alpha) != alpha or alpha < 1:
            raise ValueError("box eigenstate index alpha must be a positive integer")
        return cls("box", float(a), alpha=int(alpha))

    @classmethod
    def tabulated(cls, r, values, a: float | None = None,
                  normalize: bool = True) -> "InitialState":
        """Cubic-spline interpolant of samples on [0, a].

        With ``normalize`` the interpolant is rescaled to unit norm; otherwise
        it must already be normalized to 1e-10.
        """
        r = np.asarray(r, dtype=float)
        values = np.asarray(values, dtype=complex)
        if r.ndim != 1 or r.shape != values.shape or len(r) < 4:
            raise ValueError("tabulated state needs matching 1-D r and values (>= 4 samples)")
        if np.any(np.diff(r) <= 0):
            raise ValueError("sample positions must be strictly increasing")
        a = float(r[-1]) if a is None else float(a)
        if r[0] < 0 or r[-1] > a * (1 + 1e-12):
            raise DomainError("samples must lie in [0, a]")
        if r[0] == 0 and abs(values[0]) > NORM_TOL * np.max(np.abs(values)):
            raise ValueError("initial state must vanish at r = 0")
        splines = (CubicSpline(r, values.real), CubicSpline(r, values.imag))
        state = cls("tabulated", a, spline=splines)
        norm = state.norm()
        if normalize:
            state = cls("tabulated", a, spline=splines, scale=1.0 / np.sqrt(norm))
        elif abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"tabulated state has norm {norm:.12f}, expected 1")
        return state

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "box":
            return np.sqrt(2.0 / self.a) * np.sin(self.alpha * np.pi * r / self.a)
        re, im = self.spline
        return self.scale * (re(r) + 1j * im(r))

    @property
    def is_real(self) -> bool:
        if self.kind == "box":
            return True
        return not np.any(self.spline[1].c)

    @property
    def knots(self) -> np.ndarray:
        if self.kind == "box":
            return np.array([0.0, self.a])
        x = self.spline[0].x
        return np.concatenate(([0.0], x)) if x[0] > 0 else x

    def norm(self, order: int = 32) -> float:
        if self.kind == "box":
            return 1.0
        return float(np.real(composite_integral(lambda r: np.abs(self(r)) ** 2,
                                                self.knots, order)))

    def label(self) -> str:
        return f"box({self.alpha})" if self.kind == "box" else "tabulated"


def composite_integral(f, knots, order: int):
    """Gauss-Legendre with ``order`` nodes on every knot interval.

    ``f`` maps an array of positions to values; a trailing axis of the result
    (e.g. one entry per pole) is kept.
    """
    total = 0
    for lo, hi in zip(knots[:-1], knots[1:]):
        x, w = gauss_legendre(order, lo, hi)
        vals = f(x)
        total = total + np.tensordot(w, vals, axes=(0, 0))
    return total


@dataclass(frozen=True)
class ResonantBasis:
    """Poles and normalization constants A_n of the first N resonant states."""

    poles: PoleSet
    norm: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, p: ShellPotential, n_max: int, audit: bool = True) -> "ResonantBasis":
        poles = find_poles(p, n_max, audit=audit)
        return cls(poles, norm_constants(poles.kappa, p.a))

    @property
    def potential(self) -> ShellPotential:
        return self.poles.potential

    @property
    def a(self) -> float:
        return self.poles.potential.a

    @property
    def kappa(self) -> np.ndarray:
        return self.poles.kappa

    def __len__(self):
        return len(self.poles)

    def state(self, n: int) -> ResonantState:
        return ResonantState(self.poles[n - 1], complex(self.norm[n - 1]), self.a)

    def u(self, r) -> np.ndarray:
        """u_n(r) for n = 1..N; shape r.shape + (N,)."""
        r = np.asarray(r, dtype=float)
        if np.any((r < 0) | (r > self.a)):
            raise DomainError("resonant states are evaluated on 0 <= r <= a only")
        return self.norm * np.sin(r[..., None] * self.kappa)

    def truncated(self, n: int) -> "ResonantBasis":
        return ResonantBasis(self.poles.truncated(n), self.norm[:n])


@dataclass(frozen=True)
class CoefficientSet:
    """C_n and Cbar_n for n = 1..N."""

    c: np.ndarray = field(repr=False)
    cbar: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("c", "cbar"):
            arr = np.array(getattr(self, name), dtype=complex)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.c)

    @property
    def n_max(self) -> int:
        return len(self.c)

    @property
    def index(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    @property
    def strength(self) -> np.ndarray:
        return np.real(self.c * self.cbar)

    @property
    def cumulative_strength(self) -> np.ndarray:
        return np.cumsum(self.strength)

    @property
    def mirror_c(self) -> np.ndarray:
        """C_{-n} for the third-quadrant partners."""
        return np.conj(self.cbar)

    @property
    def mirror_cbar(self) -> np.ndarray:
        return np.conj(self.c)

    def truncated(self, n: int) -> "CoefficientSet":
        return CoefficientSet(self.c[:n], self.cbar[:n])


def _box_overlap(basis: ResonantBasis, alpha: int):
    a = basis.a
    p = alpha * np.pi / a
    k = basis.kappa
    return basis.norm * np.sqrt(2.0 / a) * 0.5 * (_sin_over(p - k, a) - _sin_over(p + k, a))


def _tabulated_overlaps(basis: ResonantBasis, psi: InitialState, tol: float = 1e-10,
                        max_order: int = 1024):
    knots = psi.knots

    def run(order):
        c = composite_integral(lambda r: psi(r)[:, None] * basis.u(r), knots, order)
        cb = composite_integral(lambda r: np.conj(psi(r))[:, None] * basis.u(r), knots, order)
        return c, cb

    order = 8
    prev = run(order)
    while order < max_order:
        order *= 2
        cur = run(order)
        if max(np.max(np.abs(cur[0] - prev[0])), np.max(np.abs(cur[1] - prev[1]))) < tol:
            return cur
        prev = cur
    raise QuadratureNotConverged(f"coefficients not converged to {tol:g} at order {max_order}")


def coefficients(basis: ResonantBasis, psi: InitialState) -> CoefficientSet:
    """C_n, Cbar_n for every state of ``basis``."""
    if abs(psi.a - basis.a) > 1e-12 * basis.a:
        raise DomainError("initial state and potential use different radii")
    if psi.kind == "box":
        c = _box_overlap(basis, psi.alpha)
        return CoefficientSet(c, c)
    c, cbar = _tabulated_overlaps(basis, psi)
    if psi.is_real:
        cbar = c
    return CoefficientSet(c, cbar)


def coefficient(state: ResonantState, psi: InitialState) -> tuple[complex, complex]:
    """(C_n, Cbar_n) for a single resonant state."""
    single = ResonantBasis(PoleSet(ShellPotential(1.0, state.a), [state.pole.kappa]),
                           np.array([state.norm_const]))
    cs = coefficients(single, psi)
    return complex(cs.c[0]), complex(cs.cbar[0])


def strength_sum(coeffs: CoefficientSet) -> float:
    """Re sum_n C_n Cbar_n over the stored coefficients."""
    return float(np.sum(coeffs.strength))


def choose_truncation(p: ShellPotential, psi: InitialState, tol: float,
                      cap: int = DEFAULT_TRUNCATION_CAP) -> int:
    """Smallest N with |1 - sum_{n<=N} Re C_n Cbar_n| <= tol."""
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    basis = ResonantBasis.build(p, cap)
    deficit = np.abs(1.0 - coefficients(basis, psi).cumulative_strength)
    ok = np.nonzero(deficit <= tol)[0]
    if len(ok) == 0:
        raise TruncationCapReached(cap, float(deficit[-1]))
    return int(ok[0]) + 1
