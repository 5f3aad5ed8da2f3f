"""Exact versus linear Zeeman shifts over a decade of field strengths.

Prints one CSV row per (n, B) with the exact shift, the linear shift
``n omega_L``, their difference and the fitted log-log slope per n.
"""
import argparse

import numpy as np

from zeeman_analog.checks import loglog_slope
from zeeman_analog.model import ModelParams
from zeeman_analog.orbit import zeeman_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha-inv", type=float, default=137.0)
    ap.add_argument("--n", default="1,-1,2,-2")
    ap.add_argument("--b-min", type=float, default=1e-6)
    ap.add_argument("--b-max", type=float, default=1e-5)
    ap.add_argument("--points", type=int, default=8)
    args = ap.parse_args()

    ns = [float(v) for v in args.n.split(",")]
    fields = np.geomspace(args.b_min, args.b_max, args.points)
    print("n,B,dE_exact,dE_linear,defect")
    for n in ns:
        defects = []
        for B in fields:
            p = ModelParams(alpha=1.0 / args.alpha_inv, m_p=1.0, sigma=0.1, B=float(B), u0=1.0)
            row = zeeman_table([n], p, 1.0)[0]
            defects.append(abs(row.dE_exact - row.dE))
            print(f"{n:g},{B:.6g},{row.dE_exact:.10e},{row.dE:.10e},{defects[-1]:.4e}")
        print(f"# n={n:g} defect slope {loglog_slope(fields, defects):.4f}")


if __name__ == "__main__":
    main()
