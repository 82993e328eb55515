"""s-wave delta-shell potential V(r) = lambda * delta(r - a).

Resonant states are u_n(r) = A_n sin(kappa_n r) inside the shell with
purely outgoing waves outside; the poles kappa_n solve

    lambda * (exp(2 i kappa a) - 1) + 2 i kappa = 0.

Only the fourth-quadrant poles are stored.  Their third-quadrant partners
-conj(kappa_n) carry u_{-n} = conj(u_n) and are generated on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateNorm, DomainError, MissedPole, NonConvergence
from .quadrature import gauss_legendre

NEWTON_MAX_ITER = 50
NEWTON_RTOL = 1e-14
RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True)
class ShellPotential:
    lam: float
    a: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive (repulsive shell, no bound states)")
        if not self.a > 0:
            raise ValueError("shell radius a must be positive")


def pole_equation_residual(p: ShellPotential, kappa):
    """lambda (e^{2 i kappa a} - 1) + 2 i kappa."""
    kappa = np.asarray(kappa, dtype=complex)
    return p.lam * np.expm1(2j * kappa * p.a) + 2j * kappa


def _residual_derivative(p: ShellPotential, kappa):
    return 2j * p.a * p.lam * np.exp(2j * kappa * p.a) + 2j


def _residual_scale(p: ShellPotential, kappa):
    # size of the individual terms; rounding in exp(2i kappa a) grows with |kappa|
    return max(p.lam, 2.0 * abs(kappa))


def initial_guess(p: ShellPotential, n: int) -> complex:
    return n * np.pi / p.a - 0.5j * np.log1p(2 * n * np.pi / (p.lam * p.a)) / p.a


def _newton(p: ShellPotential, kappa: complex):
    for _ in range(NEWTON_MAX_ITER):
        step = complex(pole_equation_residual(p, kappa) / _residual_derivative(p, kappa))
        kappa -= step
        if not np.isfinite(kappa):
            return kappa, False
        if abs(step) <= NEWTON_RTOL * (1 + abs(kappa)):
            return kappa, True
    return kappa, False


def _in_strip(p: ShellPotential, n: int, kappa: complex) -> bool:
    return (n - 0.5) * np.pi / p.a < kappa.real < (n + 0.5) * np.pi / p.a and kappa.imag < 0


def solve_pole(p: ShellPotential, n: int) -> complex:
    """Newton solve for the n-th fourth-quadrant pole.

    Starts from the large-n asymptotic guess; when that fails, follows the
    root by continuation in lambda from the nearly impenetrable shell
    lambda = 1e6 down to the requested value.
    """
    kappa, ok = _newton(p, initial_guess(p, n))
    if ok and _in_strip(p, n, kappa):
        return kappa
    lam_hi = max(1e6, p.lam)
    kappa = initial_guess(ShellPotential(lam_hi, p.a), n)
    for lam in np.geomspace(lam_hi, p.lam, 200):
        kappa, ok = _newton(ShellPotential(float(lam), p.a), kappa)
        if not ok:
            raise NonConvergence(n, kappa)
    kappa, ok = _newton(p, kappa)
    if not ok:
        raise NonConvergence(n, kappa)
    return kappa


@dataclass(frozen=True)
class Pole:
    index: int
    kappa: complex

    @property
    def energy(self) -> complex:
        return self.kappa * self.kappa

    @property
    def width(self) -> float:
        return -2.0 * self.energy.imag

    @property
    def resonance_energy(self) -> float:
        return self.energy.real

    @property
    def mirror(self) -> complex:
        return -self.kappa.conjugate()


@dataclass(frozen=True)
class PoleSet:
    potential: ShellPotential
    kappa: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = np.array(self.kappa, dtype=complex)
        k.setflags(write=False)
        object.__setattr__(self, "kappa", k)

    def __len__(self):
        return len(self.kappa)

    def __getitem__(self, i) -> Pole:
        return Pole(int(i) + 1, complex(self.kappa[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def index(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    @property
    def energy(self) -> np.ndarray:
        return self.kappa**2

    @property
    def width(self) -> np.ndarray:
        return -2.0 * self.energy.imag

    @property
    def resonance_energy(self) -> np.ndarray:
        return self.energy.real

    @property
    def lifetime(self) -> float:
        """1 / smallest width."""
        return 1.0 / float(np.min(self.width))

    def residuals(self) -> np.ndarray:
        return np.abs(pole_equation_residual(self.potential, self.kappa))

    def truncated(self, n: int) -> "PoleSet":
        return PoleSet(self.potential, self.kappa[:n])


def count_zeros(p: ShellPotential, re_lo, re_hi, im_lo, im_hi,
                max_step: float = 0.3, max_refine: int = 40) -> float:
    """Winding number of the pole-equation residual around a rectangle.

    The phase of f is tracked along the counter-clockwise boundary; segments
    whose phase jump exceeds ``max_step`` radians are bisected until none do.
    Returns the (real) winding number so callers can check it is integral.
    """
    corners = [complex(re_lo, im_lo), complex(re_hi, im_lo),
               complex(re_hi, im_hi), complex(re_lo, im_hi), complex(re_lo, im_lo)]
    total = 0.0
    for start, stop in zip(corners[:-1], corners[1:]):
        length = abs(stop - start)
        n0 = max(16, int(8 * length * p.a))
        s = np.linspace(0.0, 1.0, n0 + 1)
        for _ in range(max_refine):
            f = pole_equation_residual(p, start + (stop - start) * s)
            dphi = np.angle(f[1:] / f[:-1])
            bad = np.abs(dphi) > max_step
            if not bad.any():
                break
            mids = 0.5 * (s[:-1] + s[1:])[bad]
            s = np.sort(np.concatenate([s, mids]))
        else:
            raise MissedPole("argument-principle contour could not be resolved "
                             "(zero on or too close to the boundary)")
        total += dphi.sum()
    return total / (2 * np.pi)


def find_poles(p: ShellPotential, n_max: int, audit: bool = True) -> PoleSet:
    """Poles n = 1..n_max in the fourth quadrant, ordered by Re kappa.

    With ``audit`` the result is certified by an argument-principle count on
    a rectangle that encloses exactly the requested strips.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    roots = [solve_pole(p, n) for n in range(1, n_max + 2)]
    kappa = np.array(roots[:n_max])
    if np.any(np.diff(kappa.real) <= 0):
        raise MissedPole("poles are not strictly ordered by Re kappa (duplicate root)")
    if np.any(kappa.imag >= 0) or np.any(kappa.real <= 0):
        raise MissedPole("a pole left the fourth quadrant")
    for n, k in enumerate(kappa, start=1):
        res = abs(complex(pole_equation_residual(p, k)))
        if res > RESIDUAL_RTOL * _residual_scale(p, k):
            raise NonConvergence(n, complex(k), f"pole n={n} residual {res:.3e} too large")
    if audit:
        re_lo = 0.5 * min(kappa[0].real, 0.5 * np.pi / p.a)
        re_hi = 0.5 * (kappa[-1].real + roots[-1].real)
        im_lo = -(1.5 * np.max(-kappa.imag) + 1.0 / p.a)
        # a repulsive shell has no zeros above the axis, so the top edge can sit
        # there, away from the nearly real poles of a strong shell
        im_hi = 0.5 / p.a
        winding = count_zeros(p, re_lo, re_hi, im_lo, im_hi)
        count = int(round(winding))
        if abs(winding - count) > 0.05 or count != n_max:
            raise MissedPole(f"argument principle counts {winding:.3f} zeros, "
                             f"Newton found {n_max}")
    return PoleSet(p, kappa)


@dataclass(frozen=True)
class ResonantState:
    """u_n(r) = norm_const * sin(kappa r) on 0 <= r <= a."""

    pole: Pole
    norm_const: complex
    a: float

    def __call__(self, r):
        return eval_state(self, r)


def norm_integral(kappa, a: float):
    """Closed form of int_0^a sin^2(kappa r) dr + i sin^2(kappa a) / (2 kappa)."""
    kappa = np.asarray(kappa, dtype=complex)
    return (a / 2 - np.sin(2 * kappa * a) / (4 * kappa)
            + 0.5j * np.sin(kappa * a) ** 2 / kappa)


def norm_constants(kappa, a: float) -> np.ndarray:
    """A_n with A_n^2 = 1 / norm_integral and Re A_n > 0."""
    inv = norm_integral(kappa, a)
    if np.any(np.abs(inv) < 1e-14):
        raise DegenerateNorm("resonant-state norm integral is numerically zero")
    amp = np.sqrt(1.0 / inv)
    flip = (amp.real < 0) | ((amp.real == 0) & (amp.imag < 0))
    return np.where(flip, -amp, amp)


def normalize(pole: Pole, p: ShellPotential) -> ResonantState:
    amp = complex(norm_constants(pole.kappa, p.a))
    return ResonantState(pole, amp, p.a)


def eval_state(s: ResonantState, r):
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > s.a)):
        raise DomainError("resonant states are evaluated on 0 <= r <= a only")
    return s.norm_const * np.sin(s.pole.kappa * r)


def normalization_residual(s: ResonantState, order: int = 256) -> float:
    """|int_0^a u^2 dr + i u(a)^2/(2 kappa) - 1| with the integral done numerically."""
    x, w = gauss_legendre(order, 0.0, s.a)
    u = eval_state(s, x)
    ua = eval_state(s, s.a)
    return abs(np.sum(w * u * u) + 0.5j * ua * ua / s.pole.kappa - 1.0)
