"""Gauss-Legendre helpers shared by the coefficient, probability and oracle code."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


class QuadratureNotConverged(RuntimeError):
    """Raised when order doubling fails to reach the requested tolerance."""


@lru_cache(maxsize=64)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(order: int, lo: float = -1.0, hi: float = 1.0):
    """Nodes and weights of the ``order``-point rule mapped to [lo, hi]."""
    x, w = _legendre(order)
    half = 0.5 * (hi - lo)
    return 0.5 * (hi + lo) + half * x, half * w


def integrate(f, lo: float, hi: float, order: int = 32, tol: float = 1e-10,
              max_order: int = 2048):
    """Integrate ``f`` over [lo, hi], doubling the order until two successive
    results differ by less than ``tol`` (absolute, scaled by max(1, |I|)).

    ``f`` is called with an array of nodes and may return complex values.
    """
    x, w = gauss_legendre(order, lo, hi)
    prev = np.sum(w * f(x))
    while order < max_order:
        order *= 2
        x, w = gauss_legendre(order, lo, hi)
        cur = np.sum(w * f(x))
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise QuadratureNotConverged(
        f"Gauss-Legendre did not converge to {tol:g} by order {max_order}")
