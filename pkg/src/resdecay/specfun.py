"""Faddeyeva function w(z) and the Moshinsky function built on it.

w(z) = exp(-z**2) * erfc(-i z).  In the upper half plane two regions are
used: a Weideman rational expansion for |z| <= 6 and the Laplace continued
fraction beyond.  The lower half plane follows from

    w(z) = 2 exp(-z**2) - w(-z).

All functions accept scalars or arrays and broadcast like numpy ufuncs.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

SQRT_PI = np.sqrt(np.pi)
INV_SQRT_PI = 1.0 / SQRT_PI

_WEIDEMAN_TERMS = 40
_CF_RADIUS = 6.0
_CF_DEPTH = 40
# largest exponent representable by exp() in float64
_EXP_LIMIT = 709.0

_ROT = np.exp(0.25j * np.pi)  # e^{i pi/4}


@lru_cache(maxsize=None)
def _weideman_coefficients(n_terms: int) -> tuple[float, np.ndarray]:
    m = 2 * n_terms
    k = np.arange(-m + 1, m)
    scale = np.sqrt(n_terms / np.sqrt(2.0))
    theta = k * np.pi / m
    t = scale * np.tan(theta / 2)
    f = np.concatenate(([0.0], np.exp(-t**2) * (scale**2 + t**2)))
    a = np.real(np.fft.fft(np.fft.fftshift(f))) / (2 * m)
    return scale, a[1:n_terms + 1][::-1].copy()


def _w_weideman(z: np.ndarray) -> np.ndarray:
    scale, coeffs = _weideman_coefficients(_WEIDEMAN_TERMS)
    denom = scale - 1j * z
    zz = (scale + 1j * z) / denom
    poly = np.zeros_like(z)
    for c in coeffs:
        poly = poly * zz + c
    return 2.0 * poly / denom**2 + INV_SQRT_PI / denom


def _cf_tail(z: np.ndarray) -> np.ndarray:
    """Tail R of w(z) = (i/sqrt(pi)) / (z - R), valid for large |z|, Im z >= 0."""
    r = np.zeros_like(z)
    for k in range(_CF_DEPTH, 0, -1):
        r = (0.5 * k) / (z - r)
    return r


def _w_upper(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    far = np.abs(z) > _CF_RADIUS
    if far.any():
        zf = z[far]
        out[far] = 1j * INV_SQRT_PI / (zf - _cf_tail(zf))
    near = ~far
    if near.any():
        out[near] = _w_weideman(z[near])
    return out


def _w_sub_upper(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    far = np.abs(z) > _CF_RADIUS
    if far.any():
        zf = z[far]
        r = _cf_tail(zf)
        out[far] = 1j * INV_SQRT_PI * r / (zf * (zf - r))
    near = ~far
    if near.any():
        zn = z[near]
        out[near] = _w_weideman(zn) - 1j * INV_SQRT_PI / zn
    return out


def _gauss_factor(z: np.ndarray) -> np.ndarray:
    # 2 exp(-z^2); only called for Im z < 0 where w itself carries this growth
    expo = -(z * z)
    if np.any(expo.real > _EXP_LIMIT):
        raise OverflowError("w(z) is not representable in float64 for some inputs "
                            "(Re(-z^2) > 709)")
    return 2.0 * np.exp(expo)


def _apply(kernel, z, lower_rule):
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if not np.all(np.isfinite(z)):
        raise ValueError("faddeyeva argument must be finite")
    out = np.empty_like(z)
    upper = z.imag >= 0
    if upper.any():
        out[upper] = kernel(z[upper])
    lower = ~upper
    if lower.any():
        zl = z[lower]
        out[lower] = lower_rule(zl, kernel(-zl))
    return out[0] if scalar else out


def faddeyeva_w(z):
    """Faddeyeva function w(z) = exp(-z^2) erfc(-iz) for finite complex z."""
    return _apply(_w_upper, z, lambda zl, w_neg: _gauss_factor(zl) - w_neg)


def faddeyeva_w_subtracted(z):
    """w(z) - i/(sqrt(pi) z), evaluated without cancellation at large |z|.

    This is the Faddeyeva function with its leading asymptotic term removed;
    it decays like |z|^-3 in the upper half plane.  Undefined at z = 0.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ValueError("faddeyeva_w_subtracted is singular at z = 0")
    return _apply(_w_sub_upper, z, lambda zl, w_neg: _gauss_factor(zl) - w_neg)


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError("Moshinsky function requires t > 0")
    return t


def moshinsky_argument(x, kappa, t):
    """y = e^{-i pi/4} (x - 2 kappa t) / (2 sqrt t), in units hbar = 2m = 1."""
    t = _check_time(t)
    return np.conj(_ROT) * (np.asarray(x) - 2.0 * np.asarray(kappa) * t) / (2.0 * np.sqrt(t))


def moshinsky_m(x, kappa, t):
    """Moshinsky function M(x, kappa, t).

    Equals (i / 2 pi) * integral over real k of
    exp(i k x - i k^2 t) / (k - kappa) for t > 0, i.e.
    M = 1/2 exp(i x^2 / 4t) w(i y) with y from :func:`moshinsky_argument`.
    When i*y falls in the lower half plane the equivalent form
    exp(i kappa x - i kappa^2 t) - 1/2 exp(i x^2/4t) w(-i y) is used, which
    keeps every intermediate finite.
    """
    x = np.asarray(x, dtype=float)
    kappa = np.asarray(kappa, dtype=complex)
    t = _check_time(t)
    x, kappa, t = np.broadcast_arrays(x, kappa, t)
    iy = 1j * moshinsky_argument(x, kappa, t)
    phase = np.exp(1j * x * x / (4.0 * t))
    upper = iy.imag >= 0
    out = np.empty(iy.shape, dtype=complex)
    if upper.any():
        out[upper] = 0.5 * phase[upper] * _w_upper(np.atleast_1d(iy[upper]))
    lower = ~upper
    if lower.any():
        k, xl, tl = kappa[lower], x[lower], t[lower]
        pole = np.exp(1j * k * xl - 1j * k * k * tl)
        out[lower] = pole - 0.5 * phase[lower] * _w_upper(np.atleast_1d(-iy[lower]))
    return out[()] if out.ndim == 0 else out


def origin_factors(kappa, t, subtract_leading: bool = False):
    """Time factors of a fourth-quadrant pole and its mirror at x = 0.

    Returns ``(pole, outgoing, mirror)`` with

    * ``pole``     = exp(-i kappa^2 t)
    * ``outgoing`` = M(-y0) for the pole kappa
    * ``mirror``   = M(y0) for the mirror pole -conj(kappa)

    so that M(y0) = pole - outgoing.  With ``subtract_leading`` the
    t^{-1/2} asymptote i/(2 sqrt(pi) z) is removed from ``outgoing`` and
    ``mirror``; summed over the complete pole set these asymptotes cancel by
    the 1/kappa sum rule, so the subtraction only changes truncation error.
    Shapes broadcast between ``kappa`` and ``t``.
    """
    kappa = np.asarray(kappa, dtype=complex)
    t = _check_time(t)
    kappa, t = np.broadcast_arrays(kappa, t)
    root_t = np.sqrt(t)
    z_out = _ROT * kappa * root_t
    z_mir = _ROT * np.conj(kappa) * root_t
    w = faddeyeva_w_subtracted if subtract_leading else faddeyeva_w
    pole = np.exp(-1j * kappa * kappa * t)
    return pole, 0.5 * w(z_out), 0.5 * w(z_mir)
