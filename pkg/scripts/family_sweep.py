"""Run every check over (p, q) in {(1,1),(2,3),(3,2),(2,5)} and k in -2..2.

Writes one JSON report and prints a PASS/FAIL table.

    python3 scripts/family_sweep.py --out runs/sweep
"""
import argparse
import time
from pathlib import Path

from beltrami_knots.export import write_json
from beltrami_knots.geometry import make_knot_spec
from beltrami_knots.verify import VerifySettings, report_passed, verify_family

PQ = [(1, 1), (2, 3), (3, 2), (2, 5)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs/sweep"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-points", type=int, default=1000)
    args = ap.parse_args()

    specs = [make_knot_spec(p, q, k) for p, q in PQ for k in range(-2, 3)]
    t0 = time.perf_counter()
    report = verify_family(specs, VerifySettings(n_points=args.n_points, seed=args.seed))
    elapsed = time.perf_counter() - t0

    names = [c["name"] for c in report["sections"][0]["checks"] if c["name"] != "trefoil"]
    print(f"{'spec':>10} " + " ".join(f"{n[:9]:>9}" for n in names))
    for sec in report["sections"]:
        by = {c["name"]: c for c in sec["checks"]}
        row = " ".join(f"{by[n]['max_residual']:9.1e}" if by[n]["pass"] else f"{'FAIL':>9}" for n in names)
        print(f"{'{p},{q},{k}'.format(**sec['spec']):>10} {row}")
    for c in report["checks"][:8]:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {c['name']}: {c['max_residual']:.3e}")
    path = write_json(args.out / "family_report.json", report)
    print(f"{'PASS' if report_passed(report) else 'FAIL'} in {elapsed:.1f}s; report {path}")


if __name__ == "__main__":
    main()
