"""Two identical noninteracting particles in the same shell.

Because the particles do not interact, the two-body propagator is the
product of one-body propagators.  Every two-body quantity is therefore
assembled from the single-particle evolutions Phi_s(r, t) of the orbitals
s = alpha, beta:

    factorized:  Psi = Phi_a(r1) Phi_a(r2)
    entangled:   Psi = [Phi_a(r1) Phi_b(r2) +- Phi_b(r1) Phi_a(r2)] / sqrt 2

which is the double resonant sum over (p, q) regrouped as a product of two
single sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import single_particle as sp
from .errors import DegenerateState, QuadratureNotConverged, WindowTooShort
from .quadrature import gauss_legendre
from .resonant_basis import InitialState, ResonantBasis

SQRT_HALF = np.sqrt(0.5)


@dataclass(frozen=True)
class TwoBodyState:
    kind: str
    alpha: sp.Expansion
    beta: sp.Expansion | None = None
    sign: int = 1

    @classmethod
    def factorized(cls, basis: ResonantBasis, alpha, subtract_leading: bool = True):
        psi = InitialState.box(alpha, basis.a) if isinstance(alpha, int) else alpha
        return cls("factorized", sp.Expansion.build(basis, psi, subtract_leading))

    @classmethod
    def entangled(cls, basis: ResonantBasis, alpha, beta, sign: int,
                  subtract_leading: bool = True):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 (symmetric) or -1 (antisymmetric)")
        psi_a = InitialState.box(alpha, basis.a) if isinstance(alpha, int) else alpha
        psi_b = InitialState.box(beta, basis.a) if isinstance(beta, int) else beta
        if psi_a == psi_b:
            raise DegenerateState("entangled state needs two different orbitals")
        if psi_a.kind != "box" or psi_b.kind != "box":
            x, w = gauss_legendre(256, 0.0, basis.a)
            if abs(np.sum(w * np.conj(psi_a(x)) * psi_b(x))) > 1e-10:
                raise ValueError("entangled orbitals must be orthogonal")
        return cls("entangled",
                   sp.Expansion.build(basis, psi_a, subtract_leading),
                   sp.Expansion.build(basis, psi_b, subtract_leading),
                   sign)

    @property
    def a(self) -> float:
        return self.alpha.a

    @property
    def exchange_sign(self) -> int:
        return 1 if self.kind == "factorized" else self.sign

    def label(self) -> str:
        if self.kind == "factorized":
            return f"factorized({self.alpha.psi.label()})"
        name = "symmetric" if self.sign > 0 else "antisymmetric"
        return f"entangled-{name}({self.alpha.psi.label()},{self.beta.psi.label()})"

    def initial(self, r1, r2):
        pa1, pa2 = self.alpha.psi(r1), self.alpha.psi(r2)
        if self.kind == "factorized":
            return pa1 * pa2
        pb1, pb2 = self.beta.psi(r1), self.beta.psi(r2)
        return SQRT_HALF * (pa1 * pb2 + self.sign * pb1 * pa2)


def _combine(state: TwoBodyState, fa1, fa2, fb1=None, fb2=None):
    if state.kind == "factorized":
        return fa1 * fa2
    # alpha factor always on the left: complex products are not bitwise
    # commutative, and this keeps the exchange (anti)symmetry exact
    return SQRT_HALF * (fa1 * fb2 + state.sign * (fa2 * fb1))


def _orbitals(state: TwoBodyState, r, t):
    fa = sp.evolve(state.alpha, r, t)
    fb = sp.evolve(state.beta, r, t) if state.kind == "entangled" else None
    return fa, fb


def evolve_two(state: TwoBodyState, r1, r2, t):
    """Psi(r1, r2, t) at paired positions (r1[i], r2[i]).

    Returns shape (len(t), len(r1)); scalar inputs drop their axis.
    """
    r1a, r2a = np.broadcast_arrays(np.atleast_1d(np.asarray(r1, float)),
                                   np.atleast_1d(np.asarray(r2, float)))
    tt = np.atleast_1d(np.asarray(t, float))
    fa1, fb1 = _orbitals(state, r1a, tt)
    fa2, fb2 = _orbitals(state, r2a, tt)
    out = _combine(state, fa1, fa2, fb1, fb2)
    if np.ndim(r1) == 0 and np.ndim(r2) == 0:
        out = out[:, 0]
    return out[0] if np.ndim(t) == 0 else out


def evolve_two_split(state: TwoBodyState, r1, r2, t):
    """(exponential-containing part, pure power-law part) of Psi, t > 0.

    The power-law part combines only the non-exponential single-particle
    pieces; everything carrying at least one exp(-i kappa^2 t) goes into the
    first element.
    """
    r1a, r2a = np.broadcast_arrays(np.atleast_1d(np.asarray(r1, float)),
                                   np.atleast_1d(np.asarray(r2, float)))
    tt = np.atleast_1d(np.asarray(t, float))
    ea1, na1 = sp.evolve_split(state.alpha, r1a, tt)
    ea2, na2 = sp.evolve_split(state.alpha, r2a, tt)
    if state.kind == "factorized":
        full = _combine(state, ea1 + na1, ea2 + na2)
        tail = _combine(state, na1, na2)
    else:
        eb1, nb1 = sp.evolve_split(state.beta, r1a, tt)
        eb2, nb2 = sp.evolve_split(state.beta, r2a, tt)
        full = _combine(state, ea1 + na1, ea2 + na2, eb1 + nb1, eb2 + nb2)
        tail = _combine(state, na1, na2, nb1, nb2)
    expo = full - tail
    if np.ndim(r1) == 0 and np.ndim(r2) == 0:
        expo, tail = expo[:, 0], tail[:, 0]
    if np.ndim(t) == 0:
        expo, tail = expo[0], tail[0]
    return expo, tail


@dataclass(frozen=True)
class TwoBodyFrame:
    t: float
    r: np.ndarray
    psi: np.ndarray  # psi[i, j] = Psi(r[i], r[j], t)


def frames_two(state: TwoBodyState, times, r) -> list[TwoBodyFrame]:
    """Product-grid frames; psi[i, j] holds Psi(r_i, r_j, t)."""
    times = np.atleast_1d(np.asarray(times, float))
    r = np.atleast_1d(np.asarray(r, float))
    fa, fb = _orbitals(state, r, times)
    out = []
    for k, t in enumerate(times):
        a1, a2 = fa[k][:, None], fa[k][None, :]
        if fb is None:
            psi = _combine(state, a1, a2)
        else:
            psi = _combine(state, a1, a2, fb[k][:, None], fb[k][None, :])
        out.append(TwoBodyFrame(float(t), r, psi))
    return out


def cross_amplitude(ex_s: sp.Expansion, ex_u: sp.Expansion, t):
    """<psi_u | Phi_s(t)> = sum_n C_{n,s} Cbar_{n,u} M(y0_n) over the pole set."""
    tt = np.atleast_1d(np.asarray(t, float))
    # mirror weight C_{-n,s} Cbar_{-n,u} = conj(Cbar_{n,s} C_{n,u})
    direct = (ex_s.coeffs.c * ex_u.coeffs.cbar)[None, :]
    mirror = np.conj(ex_s.coeffs.cbar * ex_u.coeffs.c)[None, :]
    out = np.empty(len(tt), dtype=complex)
    zero = tt == 0
    if zero.any():
        x, wq = gauss_legendre(256, 0.0, ex_s.a)
        if ex_s.psi == ex_u.psi:
            out[zero] = 1.0
        else:
            out[zero] = np.sum(wq * np.conj(ex_u.psi(x)) * ex_s.psi(x))
    tp = tt[~zero]
    vals = np.empty(len(tp), dtype=complex)
    for blk in sp._blocks(len(tp)):
        pole, outg, mir = ex_s.factors(tp[blk])
        vals[blk] = (sp._weighted(pole - outg, direct) + sp._weighted(mir, mirror))[:, 0]
    out[~zero] = vals
    return out[0] if np.ndim(t) == 0 else out


def _amplitude(state: TwoBodyState, t):
    ea = state.alpha
    if state.kind == "factorized":
        return cross_amplitude(ea, ea, t) ** 2
    eb = state.beta
    return (cross_amplitude(ea, ea, t) * cross_amplitude(eb, eb, t)
            + state.sign * cross_amplitude(ea, eb, t) * cross_amplitude(eb, ea, t))


def survival_two(state: TwoBodyState, t):
    """(A(t), S(t)) with A = int int conj(Psi(r1,r2,0)) Psi(r1,r2,t)."""
    amp = _amplitude(state, t)
    return amp, np.abs(amp) ** 2


def survival_two_quadrature(state: TwoBodyState, t, order: int = 64, tol: float = 1e-10,
                            max_order: int = 512):
    """Survival amplitude from a product Gauss-Legendre grid (cross-check route)."""
    tt = np.atleast_1d(np.asarray(t, float))

    def run(n):
        x, w = gauss_legendre(n, 0.0, state.a)
        psi0 = np.conj(state.initial(x[:, None], x[None, :]))
        ww = (w[:, None] * w[None, :]) * psi0
        vals = []
        for fr in frames_two(state, tt, x):
            vals.append(np.sum(ww * fr.psi))
        return np.array(vals)

    prev = run(order)
    while order < max_order:
        order *= 2
        cur = run(order)
        if np.max(np.abs(cur - prev)) <= tol:
            return cur[0] if np.ndim(t) == 0 else cur
        prev = cur
    raise QuadratureNotConverged("two-particle survival amplitude did not converge")


def nonescape_two(state: TwoBodyState, t, order: int = 96):
    """P(t) = int int |Psi(r1, r2, t)|^2 on an order x order Gauss-Legendre grid."""
    tt = np.atleast_1d(np.asarray(t, float))
    x, w = gauss_legendre(order, 0.0, state.a)
    ww = w[:, None] * w[None, :]
    out = np.empty(len(tt))
    for blk in sp._blocks(len(tt)):
        for k, fr in enumerate(frames_two(state, tt[blk], x)):
            out[blk.start + k] = np.sum(ww * np.abs(fr.psi) ** 2)
    if np.any(tt == 0):
        psi0 = state.initial(x[:, None], x[None, :])
        out[tt == 0] = np.sum(ww * np.abs(psi0) ** 2)
    return out[0] if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class TwoBodyCurves:
    times: np.ndarray
    S: np.ndarray
    P: np.ndarray
    A: np.ndarray


def decay_curves_two(state: TwoBodyState, times, order: int = 96) -> TwoBodyCurves:
    times = np.atleast_1d(np.asarray(times, float))
    amp, surv = survival_two(state, times)
    return TwoBodyCurves(times, surv, nonescape_two(state, times, order), amp)


def post_exponential_onset(times, exponential, total, threshold: float = 1e-3) -> float:
    """Earliest time after which |exponential| < threshold |total| for good.

    Returns inf when the condition never settles within the samples.
    """
    times = np.asarray(times, float)
    ratio = np.abs(np.asarray(exponential)) / np.abs(np.asarray(total))
    bad = np.nonzero(~(ratio < threshold))[0]
    if len(bad) == 0:
        return float(times[0])
    if bad[-1] == len(times) - 1:
        return float("inf")
    return float(times[bad[-1] + 1])


def tail_fit(times, values, window, onset: float | None = None):
    """Least-squares slope of log|values| against log t inside ``window``.

    Returns (slope, standard error).  ``window`` must span at least one
    decade; with ``onset`` (see :func:`post_exponential_onset`) it must also
    start in the post-exponential era.
    """
    lo, hi = window
    if not 0 < lo < hi or hi / lo < 10 * (1 - 1e-9):
        raise WindowTooShort(f"window [{lo:g}, {hi:g}] spans less than one decade")
    if onset is not None and lo < onset:
        raise ValueError(f"window starts at {lo:g}, before the power-law onset {onset:g}")
    times = np.asarray(times, float)
    sel = (times >= lo * (1 - 1e-12)) & (times <= hi * (1 + 1e-12))
    if sel.sum() < 3:
        raise WindowTooShort("fewer than three samples inside the window")
    x = np.log(times[sel])
    y = np.log(np.abs(np.asarray(values)[sel]))
    xm = x - x.mean()
    sxx = np.sum(xm * xm)
    slope = np.sum(xm * (y - y.mean())) / sxx
    resid = y - y.mean() - slope * xm
    dof = max(len(x) - 2, 1)
    stderr = np.sqrt(np.sum(resid * resid) / dof / sxx)
    return float(slope), float(stderr)
