"""How the scan threshold trades candidate distance against knot coverage.

For each relative factor, compares the Euclidean norm |X| with the metric
norm |X|_g as the selection quantity: the farthest unrefined candidate (in
grid-cell diagonals) and the largest knot-parameter gap after refinement.
"""
import argparse
import math

import numpy as np

from beltrami_knots.geometry import make_knot_spec
from beltrami_knots.sampling import SCAN_MARGIN, grid_points
from beltrami_knots.zeroset import _field_only, dist_to_knot, max_param_gap, metric_norm, refine_zeros


def study(spec, resolution, factor, use_metric):
    pts, spacing = grid_points(resolution, SCAN_MARGIN)
    X = _field_only(pts, spec)
    size = metric_norm(X, pts, spec) if use_metric else np.linalg.norm(X, axis=1)
    keep = size < factor * np.median(size)
    cand = pts[keep]
    if not len(cand):
        return math.nan, 2 * math.pi
    far = dist_to_knot(cand, spec.p, spec.q).max() / np.linalg.norm(spacing)
    refined = [c for c in refine_zeros(cand, spec) if c.converged]
    _, t = dist_to_knot(np.array([c.point for c in refined]), spec.p, spec.q, return_param=True)
    return far, max_param_gap(t)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--spec", default="2,3,0")
    ap.add_argument("--resolution", type=int, default=64)
    args = ap.parse_args()
    spec = make_knot_spec(*(int(v) for v in args.spec.split(",")))
    print(f"coverage bound {4 * math.pi / 256:.4f}, candidate bound 2 diagonals")
    for use_metric in (False, True):
        for factor in (0.05, 0.1, 0.15, 0.2):
            far, gap = study(spec, args.resolution, factor, use_metric)
            print(f"{'|X|_g' if use_metric else '|X|  '} factor {factor:4.2f}: "
                  f"farthest candidate {far:5.2f} diagonals, coverage gap {gap:.4f}")


if __name__ == "__main__":
    main()
