"""Map where sigma_p exceeds sigma_zeta near phi = 0.

For each beta, scans |alpha| over [0, amax] and phi over [-pi/8, pi/8] and
reports the |alpha| range with violations and the largest excess.
"""
import argparse
import math

import numpy as np

from dcf import coherent as co
from dcf import eigensystem as es
from dcf import observables as ob


def scan(beta, alphas, phases, B=0.5):
    cfg = es.FieldConfig(B=B, beta=beta)
    excess = np.array([[ob.hur_closed_form(co.CoherentSpec(a, ph), cfg) for ph in phases] for a in alphas])
    return np.vectorize(lambda h: h.sigma_p - h.sigma_zeta)(excess)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--beta", type=float, nargs="+", default=[0.25, 0.5, 0.75, 0.9, 0.99])
    p.add_argument("--amax", type=float, default=4.0)
    p.add_argument("--n-alpha", type=int, default=81)
    p.add_argument("--n-phase", type=int, default=9)
    args = p.parse_args(argv)

    alphas = np.linspace(0.0, args.amax, args.n_alpha)
    phases = np.linspace(-math.pi / 8, math.pi / 8, args.n_phase)
    for beta in args.beta:
        ex = scan(beta, alphas, phases)
        rows = np.any(ex > 0, axis=1)
        if not rows.any():
            print(f"beta={beta:.2f}: sigma_p <= sigma_zeta everywhere")
            continue
        lo, hi = alphas[rows].min(), alphas[rows].max()
        print(f"beta={beta:.2f}: violated for |alpha| in [{lo:.2f}, {hi:.2f}], max excess {ex.max():.3e}")


if __name__ == "__main__":
    main()
