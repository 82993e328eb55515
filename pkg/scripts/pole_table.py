"""Print the first resonance poles of a delta shell with residuals and widths."""

import argparse

import numpy as np

from resdecay.delta_shell import ShellPotential, find_poles


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lam", type=float, default=6.0)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--n", type=int, default=10)
    args = ap.parse_args()

    poles = find_poles(ShellPotential(args.lam, args.a), args.n)
    print(f"{'n':>3} {'Re kappa':>18} {'Im kappa':>18} {'E_res':>14} {'width':>14} {'residual':>9}")
    for p, res in zip(poles, poles.residuals()):
        print(f"{p.index:3d} {p.kappa.real:18.14f} {p.kappa.imag:18.14f} "
              f"{p.resonance_energy:14.8f} {p.width:14.8f} {res:9.1e}")
    print(f"lifetime tau_1 = {poles.lifetime:.16g}")
    print(f"max residual / lambda = {np.max(poles.residuals()) / args.lam:.2e}")


if __name__ == "__main__":
    main()
