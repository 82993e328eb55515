"""Continuum-spectral ground truth for the delta shell.

With no bound states the scattering solutions phi_k, normalized as
<phi_k | phi_k'> = delta(k - k'), are complete, and

    A(t) = int_0^inf |<phi_k | psi>|^2 exp(-i k^2 t) dk.

Inside the shell phi_k(r) = N(k) sin(k r) with

    N(k)^2 = (2/pi) / [(1 + c cos ka)^2 + (c sin ka)^2],  c = lambda sin(ka) / k,

so the overlaps with box eigenstates are closed form.  None of this uses
poles, resonant states or the Faddeyeva function; it is an independent
check of the resonant expansion.

The chirped integral int g(k) exp(-i k^2 t) dk is split at the wavenumber
where the phase k^2 t reaches a few tens of radians.  Below it, plain
Gauss-Legendre panels in k; above it, panels in E = k^2 where the
oscillation has constant frequency t and a Filon-Legendre rule integrates
the Legendre interpolant of g(sqrt E) / (2 sqrt E) against exp(-i E t)
exactly (moments are spherical Bessel functions).
"""

from __future__ import annotations

import numpy as np
from scipy.special import spherical_jn

from .delta_shell import ShellPotential
from .errors import QuadratureNotConverged
from .resonant_basis import InitialState

ORDER = 24
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(ORDER)
_VANDER = np.polynomial.legendre.legvander(_NODES, ORDER - 1)
_L = np.arange(ORDER)
_LEG_SCALE = (2 * _L + 1) / 2


def continuum_norm_sq(p: ShellPotential, k):
    """N(k)^2 for delta-normalized s-wave scattering states."""
    k = np.asarray(k, dtype=float)
    ka = k * p.a
    c = p.lam * p.a * np.sinc(ka / np.pi)
    return (2 / np.pi) / ((1 + c * np.cos(ka)) ** 2 + (c * np.sin(ka)) ** 2)


def box_overlap(p: ShellPotential, alpha: int, k):
    """<phi_k | psi_alpha> for psi_alpha = sqrt(2/a) sin(alpha pi r / a)."""
    k = np.asarray(k, dtype=float)
    a = p.a
    q = alpha * np.pi / a
    # sin(x a)/x written through numpy's sinc to stay finite at k = q
    integral = 0.5 * a * (np.sinc((k - q) * a / np.pi) - np.sinc((k + q) * a / np.pi))
    return np.sqrt(continuum_norm_sq(p, k)) * np.sqrt(2 / a) * integral


def spectral_weight(p: ShellPotential, psi: InitialState, k):
    if psi.kind != "box":
        raise NotImplementedError("the spectral oracle supports box eigenstates only")
    return box_overlap(p, psi.alpha, k) ** 2


def weight_cutoff(p: ShellPotential, psi: InitialState, tail: float = 1e-10) -> float:
    """k beyond which the spectral weight is below ``tail``.

    Uses |<phi_k|psi>|^2 <= (2/pi)(2/a) q^2 / (k^2 - q^2)^2 / (1 - lambda/k)^2,
    whose integral beyond K is about 4 q^2 / (3 pi a K^3).
    """
    q = psi.alpha * np.pi / p.a
    k = (4 * q * q / (3 * np.pi * p.a * tail)) ** (1 / 3)
    return float(max(k, 4 * q, 4 * p.lam) * 1.1)


def _k_panels(t, k_max, dk, phase):
    k0 = k_max if t <= 0 else min(np.sqrt(phase / t), k_max)
    n = max(4, int(np.ceil(k0 / dk)), int(np.ceil(phase / 2)))
    return np.linspace(0.0, k0, n + 1)


def _e_edges(k0, k_max, dk, dk_far, k_far):
    edges = [k0]
    while edges[-1] < k_max:
        k = edges[-1]
        step = dk if k < k_far else dk_far
        edges.append(min(k_max, k + min(step, 0.3 * k)))
    return np.asarray(edges) ** 2


def _filon_panels(rho_vals, centre, half, t):
    """sum over panels of int rho(E) exp(-i E t) dE on [c - h, c + h]."""
    coef = (rho_vals * _WEIGHTS) @ _VANDER * _LEG_SCALE
    omega = half * t
    moments = 2 * (-1j) ** _L * spherical_jn(_L[None, :], omega[:, None])
    return np.sum(half * np.exp(-1j * centre * t) * np.sum(coef * moments, axis=1))


def chirp_integral(g, t: float, k_max: float, dk: float = 0.125, dk_far: float = 0.5,
                   k_far: float = 50.0, phase: float = 30.0, g_prime=None):
    """int_0^k_max g(k) exp(-i k^2 t) dk, plus an asymptotic tail when ``g_prime`` is given.

    ``g`` must be smooth on the real axis; ``g_prime`` (its derivative) enables
    a two-term integration-by-parts estimate of the part beyond ``k_max``,
    needed for integrands that decay slowly.
    """
    edges = _k_panels(t, k_max, dk, phase)
    c = 0.5 * (edges[1:] + edges[:-1])
    h = 0.5 * np.diff(edges)
    kk = c[:, None] + h[:, None] * _NODES
    total = np.sum(h[:, None] * _WEIGHTS * g(kk) * np.exp(-1j * kk * kk * t))
    k0 = edges[-1]
    if k0 < k_max:
        e = _e_edges(k0, k_max, dk, dk_far, k_far)
        ce = 0.5 * (e[1:] + e[:-1])
        he = 0.5 * np.diff(e)
        ee = ce[:, None] + he[:, None] * _NODES
        ks = np.sqrt(ee)
        total += _filon_panels(g(ks) / (2 * ks), ce, he, t)
    if g_prime is not None and t > 0:
        k = k_max
        e = k * k
        rho = g(np.array(k)) / (2 * k)
        drho = g_prime(np.array(k)) / (4 * e) - g(np.array(k)) / (4 * e * k)
        total += np.exp(-1j * e * t) * (rho / (1j * t) + drho / (1j * t) ** 2)
    return complex(total)


def spectral_amplitude(psi: InitialState, p: ShellPotential, t: float,
                       k_max: float | None = None, dk: float = 0.125,
                       check: bool = False, tol: float = 1e-8) -> complex:
    """A(t) from the continuum spectral integral.

    With ``check`` the panel widths are halved and the two results must agree
    to ``tol``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if psi.kind != "box":
        raise NotImplementedError("the spectral oracle supports box eigenstates only")
    k_max = weight_cutoff(p, psi) if k_max is None else k_max

    def g(k):
        return spectral_weight(p, psi, k)

    value = chirp_integral(g, t, k_max, dk=dk)
    if check:
        finer = chirp_integral(g, t, k_max, dk=dk / 2, dk_far=0.25)
        if abs(finer - value) > tol:
            raise QuadratureNotConverged(
                f"spectral amplitude changed by {abs(finer - value):.2e} on refinement")
        value = finer
    return value


def spectral_survival(psi: InitialState, p: ShellPotential, times, **kw) -> np.ndarray:
    return np.array([abs(spectral_amplitude(psi, p, float(t), **kw)) ** 2 for t in times])


def moshinsky_quadrature(x: float, kappa: complex, t: float, k_max: float | None = None) -> complex:
    """(i / 2 pi) int_R exp(i k x - i k^2 t) / (k - kappa) dk by direct quadrature.

    The negative half line is folded onto the positive one; ``kappa`` must
    stay off the real axis.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if kappa.imag == 0:
        raise ValueError("kappa must not lie on the real axis")
    if k_max is None:
        k_max = max(400.0, 20 * abs(kappa), 40 * abs(x) / t)

    def g(k):
        ep, em = np.exp(1j * k * x), np.exp(-1j * k * x)
        return ep / (k - kappa) - em / (k + kappa)

    def g_prime(k):
        ep, em = np.exp(1j * k * x), np.exp(-1j * k * x)
        return (1j * x * ep / (k - kappa) - ep / (k - kappa) ** 2
                + 1j * x * em / (k + kappa) + em / (k + kappa) ** 2)

    return 1j / (2 * np.pi) * chirp_integral(g, t, k_max, dk=min(0.125, abs(kappa.imag) / 2),
                                             g_prime=g_prime)


__all__ = [
    "continuum_norm_sq",
    "box_overlap",
    "spectral_weight",
    "weight_cutoff",
    "chirp_integral",
    "spectral_amplitude",
    "spectral_survival",
    "moshinsky_quadrature",
]
