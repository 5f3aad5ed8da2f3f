"""Render |u| on the orbital plane for a selection-rule pair as PGM frames.

Defaults give the toy atom n = 1, m+ = 4, m- = 2 (alpha = 1/3) at
t = 0, T/4 and 3T/4 of the beat period, written to ``--out-dir``.
"""
import argparse
import math
from pathlib import Path

from zeeman_analog.field import build_selection_pair, field_grid, write_grid_pgm
from zeeman_analog.model import ModelParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-plus", type=int, default=4)
    ap.add_argument("--m-minus", type=int, default=2)
    ap.add_argument("--B", type=float, default=0.0)
    ap.add_argument("--resolution", type=int, default=301)
    ap.add_argument("--out-dir", default="figures")
    args = ap.parse_args()

    n = 0.5 * (args.m_plus - args.m_minus)
    alpha = n * n / (0.5 * (args.m_plus + args.m_minus))
    p = ModelParams(alpha=alpha, m_p=1.0, sigma=0.1, B=args.B, u0=1.0)
    pair, orbit = build_selection_pair(args.m_plus, args.m_minus, p, 1.0)
    period = 2.0 * math.pi / abs(pair.beat)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for label, t in (("t0", 0.0), ("tq", 0.25 * period), ("t3q", 0.75 * period)):
        path = out / f"field_m{args.m_plus}_{args.m_minus}_{label}.pgm"
        write_grid_pgm(field_grid(pair, t, 3.0 * orbit.r, args.resolution), path)
        print(f"{path}  t={t:.6g}  r_n={orbit.r:.6g}  alpha={alpha:.6g}")


if __name__ == "__main__":
    main()
