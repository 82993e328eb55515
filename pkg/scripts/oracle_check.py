"""Compare the resonant expansion with the continuum-spectral integral."""

import argparse
import time

import numpy as np

from resdecay import single_particle as sp
from resdecay.delta_shell import ShellPotential
from resdecay.reference_oracle import spectral_amplitude
from resdecay.resonant_basis import InitialState, ResonantBasis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=6.0)
    ap.add_argument("--alpha", type=int, default=1)
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--points", type=int, default=25)
    args = ap.parse_args()

    p = ShellPotential(args.lam)
    psi = InitialState.box(args.alpha)
    basis = ResonantBasis.build(p, args.n)
    ex = sp.Expansion.build(basis, psi)
    tau = basis.poles.lifetime
    print(f"{'t/tau_1':>10} {'|A_res - A_spec|':>18} {'S_res':>12} {'rel. gap':>10}")
    start = time.perf_counter()
    for t in np.geomspace(0.1 * tau, 1e3 * tau, args.points):
        a_spec = spectral_amplitude(psi, p, t, check=True)
        a_res = sp.survival_amplitude(ex, t)
        print(f"{t / tau:10.3g} {abs(a_res - a_spec):18.2e} {abs(a_res) ** 2:12.4e} "
              f"{abs(abs(a_spec) ** 2 / abs(a_res) ** 2 - 1):10.1e}")
    print(f"oracle time {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
