"""Lab-operator residuals of the rotated and unrotated atom field versus B.

Both grow linearly with the field. The rotated residual keeps only the
cross term between the Larmor shift and the Coulomb potential, so the
ratio stays near alpha instead of tending to zero.
"""
import argparse

import numpy as np

from zeeman_analog.checks import loglog_slope
from zeeman_analog.field import build_selection_pair
from zeeman_analog.larmor import larmor_cancellation_test
from zeeman_analog.model import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha-inv", type=int, default=137)
    ap.add_argument("--samples", type=int, default=64)
    ap.add_argument("--points", type=int, default=4)
    args = ap.parse_args()

    inv = args.alpha_inv
    fields = np.geomspace(1e-6, 1e-5, args.points)
    print("B,residual_rotated,residual_unrotated,ratio")
    unrotated = []
    for B in fields:
        p = ModelParams(alpha=1.0 / inv, m_p=1.0, sigma=0.1, B=float(B), u0=1.0)
        pair, _ = build_selection_pair(inv + 1, inv - 1, p, 1.0)
        rep = larmor_cancellation_test(pair, p, sample_count=args.samples)
        unrotated.append(rep.residual_unrotated)
        print(f"{B:.4g},{rep.residual_rotated:.4e},{rep.residual_unrotated:.4e},{rep.ratio:.4e}")
    print(f"# unrotated slope {loglog_slope(fields, unrotated):.5f}")


if __name__ == "__main__":
    main()
