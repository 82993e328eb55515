"""Long-time laws of two identical particles, window by window.

For the factorized, entangled-symmetric and entangled-antisymmetric states
built from box orbitals (alpha, beta), fit log|Psi(r1, r2, t)| and log S(t)
against log t on successive one-decade windows and report where the
power-law era begins.  The antisymmetric tail is a strong cancellation, so
its last decade shows rounding before the symmetric one does.
"""

import argparse

import numpy as np

from resdecay import two_particle as tp
from resdecay.delta_shell import ShellPotential
from resdecay.resonant_basis import ResonantBasis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=6.0)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--alpha", type=int, default=1)
    ap.add_argument("--beta", type=int, default=2)
    ap.add_argument("--r", type=float, nargs=2, default=(0.3, 0.6))
    args = ap.parse_args()

    basis = ResonantBasis.build(ShellPotential(args.lam), args.n)
    tau = basis.poles.lifetime
    r1, r2 = args.r
    states = [tp.TwoBodyState.factorized(basis, args.alpha),
              tp.TwoBodyState.entangled(basis, args.alpha, args.beta, +1),
              tp.TwoBodyState.entangled(basis, args.alpha, args.beta, -1)]
    probe = np.geomspace(tau, 1e4 * tau, 400)
    for st in states:
        e, _ = tp.evolve_two_split(st, r1, r2, probe)
        onset = tp.post_exponential_onset(probe, e, tp.evolve_two(st, r1, r2, probe))
        print(f"{st.label()}: power-law onset {onset / tau:.0f} tau_1")
        for lo in (1e1, 3e1, 1e2, 3e2, 1e3):
            t = np.geomspace(lo * tau, 10 * lo * tau, 50)
            win = (t[0], t[-1])
            wf = tp.tail_fit(t, np.abs(tp.evolve_two(st, r1, r2, t)), win)[0]
            s = tp.tail_fit(t, tp.survival_two(st, t)[1], win)[0]
            print(f"   [{lo:6g}, {10 * lo:6g}] tau_1   |Psi| {wf:8.4f}   S {s:8.4f}")
        p_last = tp.nonescape_two(st, 1e4 * tau)
        print(f"   P(1e4 tau_1) = {p_last:.3e}")


if __name__ == "__main__":
    main()
