"""Integrated angular-frequency shift against the Larmor frequency.

The relative error ``|shift - omega_L| / omega_L`` is printed next to the
weak-field parameter x = omega_L / Omega_orbit; it follows 2x, the
second-order (diamagnetic) correction, down to the integrator floor.
"""
import argparse

import numpy as np

from zeeman_analog.checks import ode_larmor_shift
from zeeman_analog.model import ModelParams, larmor_frequency


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha-inv", type=float, default=137.0)
    ap.add_argument("--points", type=int, default=5)
    ap.add_argument("--steps-per-period", type=int, default=10_000)
    args = ap.parse_args()

    print("B,x,shift,omega_L,relative_error,relative_error_over_x")
    for B in np.geomspace(1e-7, 1e-5, args.points):
        p = ModelParams(alpha=1.0 / args.alpha_inv, m_p=1.0, sigma=0.1, B=float(B), u0=1.0)
        x = larmor_frequency(p, 1.0) * args.alpha_inv**2
        s = ode_larmor_shift(p, 1.0, steps_per_period=args.steps_per_period)
        print(f"{B:.3g},{x:.4e},{s['shift']:.6e},{s['omega_L']:.6e},{s['relative_error']:.4e},"
              f"{s['relative_error'] / x:.4f}")


if __name__ == "__main__":
    main()
