"""Acceptance criteria at their stated tolerances, one printed line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the PASS/FAIL lines appear
in the terminal output even with capture enabled.
"""
import math

import numpy as np
import pytest

from beltrami_knots.geometry import make_knot_spec
from beltrami_knots.sampling import sample_in_domain
from beltrami_knots.verify import (
    beltrami_residuals,
    check_distinct,
    check_flat,
    check_metric,
    check_pushforward,
    check_tameness,
    check_trefoil,
    check_worked_values,
    check_zero_set,
)
from beltrami_knots.zeroset import ZeroSetConfig

from .conftest import FAMILY, KS, PQ

N_POINTS = 1000
SEED = 20240611


def announce(capsys, criterion: str, passed: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[ACCEPTANCE] {'PASS' if passed else 'FAIL'} {criterion}: {detail}")


@pytest.fixture(scope="module")
def specs():
    return [make_knot_spec(*s) for s in FAMILY]


@pytest.fixture(scope="module")
def points():
    return sample_in_domain(N_POINTS, SEED)


@pytest.fixture(scope="module")
def sweep(specs, points):
    return {s: beltrami_residuals(s, points) for s in specs}


@pytest.fixture(scope="module")
def zero_reports(specs):
    cfg = ZeroSetConfig(resolution=64)
    return {s: check_zero_set(s, cfg) for s in specs}


def test_beltrami_identity(sweep, capsys):
    worst = max(float(rel.max()) for rel, _ in sweep.values())
    ok = worst <= 1e-8
    announce(capsys, "Beltrami identity", ok,
             f"max relative |curl_g X - X| = {worst:.2e} over {len(sweep)} specs x {N_POINTS} points (tol 1e-8)")
    assert ok


def test_divergence_free(sweep, capsys):
    worst = max(float(div.max()) for _, div in sweep.values())
    ok = worst <= 1e-8
    announce(capsys, "Divergence-free", ok, f"max |div_g X| = {worst:.2e} (tol 1e-8)")
    assert ok


def test_flat_model_base_case(capsys):
    checks = check_flat(N_POINTS, SEED)
    ok = all(c.passed for c in checks)
    announce(capsys, "Flat-model base case", ok,
             ", ".join(f"{c.name} = {c.max_residual:.2e}" for c in checks) + " (tol 1e-12)")
    assert ok


def test_zero_set(zero_reports, capsys):
    fwd = max(rep.forward_max_residual for _, rep in zero_reports.values())
    rev = max(rep.max_knot_distance for _, rep in zero_reports.values())
    n_conv = min(rep.n_converged for _, rep in zero_reports.values())
    floors = {d: min(rep.min_offknot_field_norm[d] for _, rep in zero_reports.values()) for d in (0.05, 0.1, 0.2)}
    ok = fwd <= 1e-10 and rev <= 1e-6 and n_conv > 0 and all(v > 0 for v in floors.values())
    floor_txt = ", ".join(f"m({d:g}) >= {v:.3f}" for d, v in floors.items())
    announce(capsys, "Zero set", ok,
             f"forward max |X| = {fwd:.2e} (tol 1e-10, 1e4 samples), reverse max distance = {rev:.2e} "
             f"(tol 1e-6), {floor_txt}")
    assert ok


def test_pushforward_and_pullback(specs, points, capsys):
    push = [check_pushforward(s, points) for s in specs]
    pull = [c for s in specs for c in check_metric(s, points)]
    worst_push = max(c.max_residual for c in push)
    worst_pull = max(c.max_residual for c in pull if c.name == "pullback")
    spd = all(c.passed for c in pull if c.name == "metric_spd")
    ok = worst_push <= 1e-10 and worst_pull <= 1e-9 and spd
    announce(capsys, "Closed form vs pushforward / metric vs pullback", ok,
             f"pushforward {worst_push:.2e} (tol 1e-10), pullback {worst_pull:.2e} (tol 1e-9), SPD={spd}")
    assert ok


def test_trefoil_oracle(specs, points, capsys):
    checks = [check_trefoil(s, points) for s in specs if (s.p, s.q) == (2, 3)]
    worst = max(c.max_residual for c in checks)
    ok = worst <= 1e-12
    announce(capsys, "Trefoil oracle", ok, f"max deviation {worst:.2e} over k = -2..2 (tol 1e-12)")
    assert ok


def test_worked_values(capsys):
    checks = check_worked_values()
    ok = all(c.passed for c in checks)
    announce(capsys, "Worked values", ok,
             "g(3,0,0), det 1/9, M_{2,3,0}, ext-gcd(2,3) = (-1,1): "
             + ", ".join(f"{c.name}={'ok' if c.passed else 'bad'}" for c in checks))
    assert ok


def test_family_distinctness(capsys):
    gaps = []
    for p, q in PQ:
        checks = check_distinct([make_knot_spec(p, q, k) for k in KS])
        gaps += [c.max_residual for c in checks]
    worst = min(gaps)
    ok = worst > 1e-6
    announce(capsys, "Family distinctness", ok, f"smallest pairwise gap {worst:.3e} (must exceed 1e-6)")
    assert ok


def test_tameness_clauses(specs, capsys):
    results = [check_tameness(s, 1024)[0] for s in specs]
    failed = [c.name for checks in results for c in checks if not c.passed]
    speed = max(c.max_residual for checks in results for c in checks if c.name == "tame_unit_speed")
    conv = max(c.max_residual for checks in results for c in checks if c.name == "tame_self_convergence")
    fenchel = min(c.max_residual for checks in results for c in checks if c.name == "tame_fenchel")
    ok = not failed
    announce(capsys, "Tameness clauses", ok,
             f"unit-speed dev {speed:.1e} (tol 1e-8), self-convergence {conv:.1e} (tol 1e-3), "
             f"min total curvature {fenchel:.4f} >= 2pi - 1e-6" + (f"; failed {sorted(set(failed))}" if failed else ""))
    assert ok


def test_structure_coverage(zero_reports, capsys):
    worst = max(rep.coverage_max_gap for _, rep in zero_reports.values())
    degenerate = any(rep.degenerate for _, rep in zero_reports.values())
    bound = 4 * math.pi / 256
    ok = worst <= bound and not degenerate
    announce(capsys, "Structure-theorem coverage", ok,
             f"max knot-parameter gap {worst:.4f} at resolution 64 (tol {bound:.4f})")
    assert ok
