"""Exact single-particle evolution inside the shell.

    Psi(r, t) = sum_{n = +-1 .. +-N} C_n u_n(r) M(y0_n, t),   0 <= r < a

with M(y0_n) = exp(-i kappa_n^2 t) - M(-y0_n) for fourth-quadrant poles.
The first piece is the exponentially decaying part; the rest is the
non-exponential part that takes over at long times.

Each outgoing term M(-y0_n) behaves like c / (kappa_n sqrt t) at long times,
and these leading pieces cancel exactly in the full sum because
sum_n u_n(r) u_n(r') / kappa_n = 0.  A truncated sum leaves a spurious
t^{-1/2} remainder that eventually swamps the t^{-3/2} tail, so by default
the leading pieces are dropped term by term (``subtract_leading=True``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, QuadratureNotConverged
from .quadrature import gauss_legendre
from .resonant_basis import CoefficientSet, InitialState, ResonantBasis, coefficients
from .specfun import origin_factors

# fixed block size keeps every reduction identical whatever the thread count
TIME_BLOCK = 16


@dataclass(frozen=True)
class Expansion:
    """A normalized initial state expanded on a truncated resonant basis."""

    basis: ResonantBasis
    psi: InitialState
    coeffs: CoefficientSet = field(repr=False)
    subtract_leading: bool = True

    @classmethod
    def build(cls, basis: ResonantBasis, psi: InitialState,
              subtract_leading: bool = True) -> "Expansion":
        return cls(basis, psi, coefficients(basis, psi), subtract_leading)

    @property
    def a(self) -> float:
        return self.basis.a

    @property
    def n_max(self) -> int:
        return len(self.basis)

    def factors(self, t):
        """(pole, outgoing, mirror) time factors with shape t.shape + (N,)."""
        t = np.asarray(t, dtype=float)
        return origin_factors(self.basis.kappa, t[..., None], self.subtract_leading)


@dataclass(frozen=True)
class DecayCurves:
    times: np.ndarray
    S: np.ndarray
    P: np.ndarray
    A: np.ndarray


@dataclass(frozen=True)
class WaveFunctionFrame:
    t: float
    r: np.ndarray
    psi: np.ndarray


def _times(t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.ndim != 1:
        raise ValueError("times must be a scalar or a 1-D array")
    if np.any(~(t >= 0)):
        raise DomainError("time must be non-negative")
    return t


def _interior(r, a):
    r = np.atleast_1d(np.asarray(r, dtype=float))
    if r.ndim != 1:
        raise ValueError("positions must be a scalar or a 1-D array")
    if np.any((r < 0) | (r >= a)):
        raise DomainError("the interior expansion holds for 0 <= r < a")
    return r


def _squeeze(out, t, r):
    if np.ndim(r) == 0:
        out = out[..., 0]
    if np.ndim(t) == 0:
        out = out[0]
    return out


def _blocks(n):
    return [slice(i, min(i + TIME_BLOCK, n)) for i in range(0, n, TIME_BLOCK)]


def _weighted(factor, weights):
    # factor (T, N), weights (R, N) -> (T, R); fixed summation order over n
    return np.einsum("tn,rn->tr", factor, weights, optimize=False)


def _parts(ex: Expansion, r, t):
    """Exponential and non-exponential parts on the (t, r) grid, t > 0."""
    u = ex.basis.u(r)
    direct = ex.coeffs.c * u
    mirror = np.conj(ex.coeffs.cbar * u)
    expo = np.empty((len(t), len(r)), dtype=complex)
    nonexp = np.empty_like(expo)
    for blk in _blocks(len(t)):
        pole, out, mir = ex.factors(t[blk])
        expo[blk] = _weighted(pole, direct)
        nonexp[blk] = _weighted(mir, mirror) - _weighted(out, direct)
    return expo, nonexp


def evolve(ex: Expansion, r, t):
    """Psi(r, t) for 0 <= r < a, t >= 0.  Shape (len(t), len(r)) for arrays."""
    rr, tt = _interior(r, ex.a), _times(t)
    out = np.empty((len(tt), len(rr)), dtype=complex)
    zero = tt == 0
    if zero.any():
        out[zero] = ex.psi(rr)
    pos = ~zero
    if pos.any():
        u = ex.basis.u(rr)
        direct = ex.coeffs.c * u
        mirror = np.conj(ex.coeffs.cbar * u)
        tp = tt[pos]
        vals = np.empty((len(tp), len(rr)), dtype=complex)
        for blk in _blocks(len(tp)):
            pole, outg, mir = ex.factors(tp[blk])
            vals[blk] = _weighted(pole - outg, direct) + _weighted(mir, mirror)
        out[pos] = vals
    return _squeeze(out, t, r)


def evolve_split(ex: Expansion, r, t):
    """(exponential_part, nonexponential_part) of Psi(r, t), t > 0."""
    rr, tt = _interior(r, ex.a), _times(t)
    if np.any(tt == 0):
        raise DomainError("the exponential / non-exponential split needs t > 0")
    expo, nonexp = _parts(ex, rr, tt)
    return _squeeze(expo, t, r), _squeeze(nonexp, t, r)


def _amplitude_weights(ex: Expansion):
    cc = ex.coeffs.cbar * ex.coeffs.c
    return cc[None, :], np.conj(cc)[None, :]


def amplitude_parts(ex: Expansion, t):
    """Exponential and non-exponential parts of the survival amplitude, t > 0."""
    tt = _times(t)
    direct, mirror = _amplitude_weights(ex)
    expo = np.empty(len(tt), dtype=complex)
    nonexp = np.empty_like(expo)
    for blk in _blocks(len(tt)):
        pole, out, mir = ex.factors(tt[blk])
        expo[blk] = _weighted(pole, direct)[:, 0]
        nonexp[blk] = (_weighted(mir, mirror) - _weighted(out, direct))[:, 0]
    if np.ndim(t) == 0:
        return expo[0], nonexp[0]
    return expo, nonexp


def _amplitude_coefficients(ex: Expansion, tt):
    direct, mirror = _amplitude_weights(ex)
    out = np.empty(len(tt), dtype=complex)
    zero = tt == 0
    out[zero] = 1.0
    tp = tt[~zero]
    vals = np.empty(len(tp), dtype=complex)
    for blk in _blocks(len(tp)):
        pole, outg, mir = ex.factors(tp[blk])
        vals[blk] = (_weighted(pole - outg, direct) + _weighted(mir, mirror))[:, 0]
    out[~zero] = vals
    return out


def _amplitude_quadrature(ex: Expansion, tt, order=64, tol=1e-10, max_order=1024):
    def run(n):
        x, w = gauss_legendre(n, 0.0, ex.a)
        psi0 = np.conj(ex.psi(x))
        vals = evolve(ex, x, tt)
        return (vals * psi0) @ w

    prev = run(order)
    while order < max_order:
        order *= 2
        cur = run(order)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur
        prev = cur
    raise QuadratureNotConverged(f"survival amplitude not converged at order {max_order}")


def survival_amplitude(ex: Expansion, t, method: str = "coefficients"):
    """A(t) = int_0^a conj(Psi(r,0)) Psi(r,t) dr.

    ``method="coefficients"`` sums Cbar_n C_n M(y0_n) over the pole set;
    ``method="quadrature"`` integrates the evolved wavefunction numerically.
    """
    tt = _times(t)
    if method == "coefficients":
        out = _amplitude_coefficients(ex, tt)
    elif method == "quadrature":
        out = _amplitude_quadrature(ex, tt)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[0] if np.ndim(t) == 0 else out


def survival_probability(ex: Expansion, t, method: str = "coefficients"):
    return np.abs(survival_amplitude(ex, t, method)) ** 2


def nonescape_probability(ex: Expansion, t, order: int = 128):
    """P(t) = int_0^a |Psi(r,t)|^2 dr on ``order`` Gauss-Legendre nodes."""
    x, w = gauss_legendre(order, 0.0, ex.a)
    tt = _times(t)
    vals = evolve(ex, x, tt)
    out = (np.abs(vals) ** 2) @ w
    out[tt == 0] = ex.psi.norm()
    return out[0] if np.ndim(t) == 0 else out


def decay_curves(ex: Expansion, times, order: int = 128) -> DecayCurves:
    times = _times(times)
    amp = survival_amplitude(ex, times)
    return DecayCurves(times, np.abs(amp) ** 2, nonescape_probability(ex, times, order), amp)


def frames(ex: Expansion, times, r) -> list[WaveFunctionFrame]:
    times = _times(times)
    r = _interior(r, ex.a)
    vals = evolve(ex, r, times)
    return [WaveFunctionFrame(float(t), r, vals[i]) for i, t in enumerate(times)]


def default_time_grid(ex_or_basis, points: int = 400, lo: float = 1e-3, hi: float = 1e4):
    """Log-spaced times from lo * tau_1 to hi * tau_1."""
    basis = getattr(ex_or_basis, "basis", ex_or_basis)
    tau = basis.poles.lifetime
    return np.geomspace(lo * tau, hi * tau, points)
