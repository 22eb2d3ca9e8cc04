"""Condition numbers of g_{p,q,k} over seeded in-domain points (reporting only)."""
import argparse

import numpy as np

from beltrami_knots.geometry import make_knot_spec
from beltrami_knots.metric import metric_g
from beltrami_knots.sampling import sample_in_domain


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-points", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    pts = sample_in_domain(args.n_points, args.seed)
    print(f"{'p':>2} {'q':>2} {'k':>3} {'median cond':>12} {'max cond':>12} {'min eig':>10}")
    for p, q in [(1, 1), (2, 3), (3, 2), (2, 5)]:
        for k in range(-2, 3):
            mv = metric_g(pts, make_knot_spec(p, q, k))
            cond = mv.cond()
            w = np.linalg.eigvalsh(mv.g)[:, 0]
            print(f"{p:>2} {q:>2} {k:>3} {np.median(cond):12.3e} {cond.max():12.3e} {w.min():10.3e}")


if __name__ == "__main__":
    main()
