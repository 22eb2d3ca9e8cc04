import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from beltrami_knots.geometry import make_knot_spec, torus_knot_point
from beltrami_knots.zeroset import (
    LMSettings,
    ZeroSetConfig,
    certify_zero_set,
    dist_to_knot,
    golden_section_min,
    grid_scan,
    max_param_gap,
    metric_norm,
    refine_zero,
    refine_zeros,
    scan,
)
from beltrami_knots.fields import field_X
from beltrami_knots.sampling import sample_in_domain

from .strategies import annulus_points


def brute_distance(pt, p, q, n=200_000):
    """Dense sampling then bounded scalar minimisation around the best sample."""
    t = np.arange(n) * (2 * math.pi / n)
    k = torus_knot_point(p, q, t).array()
    i = int(np.argmin(np.linalg.norm(k - pt, axis=1)))

    def f2(s):
        return float(np.sum((torus_knot_point(p, q, s).array() - pt) ** 2))

    # squared distance is smooth at the knot itself
    h = 2 * math.pi / n
    res = minimize_scalar(f2, bounds=(t[i] - h, t[i] + h), method="bounded", options={"xatol": 1e-14})
    return math.sqrt(res.fun)


def test_golden_section_vectorised():
    a = np.array([0.0, -1.0])
    b = np.array([2.0, 3.0])
    x = golden_section_min(lambda s: (s - np.array([0.7, 1.9])) ** 2, a, b, tol=1e-12)
    np.testing.assert_allclose(x, [0.7, 1.9], atol=1e-9)


def test_distance_examples():
    assert dist_to_knot(np.array([3.0, 0.0, 0.1]), 2, 3) == pytest.approx(0.0976, abs=5e-4)
    on = torus_knot_point(2, 3, 1.234).array()
    assert dist_to_knot(on, 2, 3) <= 1e-9


@given(annulus_points(), st.sampled_from([(2, 3), (1, 1), (2, 5)]))
def test_distance_matches_brute_force(xyz, pq):
    pt = np.array(xyz)
    assert dist_to_knot(pt, *pq) == pytest.approx(brute_distance(pt, *pq), abs=1e-9)


def test_distance_param_points_at_nearest():
    pts = sample_in_domain(20, seed=5)
    d, t = dist_to_knot(pts, 2, 3, return_param=True)
    k = torus_knot_point(2, 3, t).array()
    np.testing.assert_allclose(np.linalg.norm(pts - k, axis=1), d, atol=1e-12)
    assert np.all((t >= 0) & (t < 2 * math.pi))


def test_lm_converges_to_knot(trefoil):
    start = torus_knot_point(2, 3, 0.8).array() + np.array([0.03, -0.02, 0.04])
    c = refine_zero(start, trefoil)
    assert c.converged and c.refined and not c.exited_domain
    assert c.residual <= 1e-12
    assert c.knot_distance <= 1e-6
    assert c.iterations <= LMSettings().max_iter


def test_lm_monotone_and_flags_exit(trefoil):
    near_boundary = np.array([[3.49, 0.0, 0.0]])
    c = refine_zeros(near_boundary, trefoil)[0]
    assert c.residual <= np.linalg.norm(field_X(near_boundary, trefoil))
    with pytest.raises(ValueError):
        refine_zeros(np.array([[0.0, 0.0, 0.0]]), trefoil)


def test_lm_start_on_zero_needs_no_steps(trefoil):
    c = refine_zeros(torus_knot_point(2, 3, 0.1).array()[None, :], trefoil)[0]
    assert c.converged and c.iterations == 0


def test_scan_candidates_near_knot(trefoil):
    res = scan(trefoil, 64)
    diag = float(np.linalg.norm(res.spacing))
    d = dist_to_knot(res.points, 2, 3)
    assert len(res.points) > 0
    assert d.max() <= 2 * diag
    with pytest.raises(ValueError):
        scan(trefoil, 7)


def test_grid_scan_fills_distances(trefoil):
    cands = grid_scan(trefoil, 16)
    assert cands and all(np.isfinite(c.knot_distance) for c in cands)
    assert not any(c.refined for c in cands)


def test_metric_norm_is_flat_norm_at_preimage(trefoil):
    # psi o twist is an isometry from the flat model, so |X|_g = |B| at the preimage
    from beltrami_knots.fields import base_field
    from beltrami_knots.geometry import psi_inv, twist_inv

    pts = sample_in_domain(50, seed=9)
    n_g = metric_norm(field_X(pts, trefoil), pts, trefoil)
    np.testing.assert_allclose(n_g, np.linalg.norm(base_field(twist_inv(psi_inv(pts), trefoil)), axis=-1),
                               atol=1e-10)


def test_max_param_gap():
    assert max_param_gap(np.array([])) == pytest.approx(2 * math.pi)
    assert max_param_gap(np.array([0.0, math.pi])) == pytest.approx(math.pi)
    assert max_param_gap(np.array([0.1, 6.2])) == pytest.approx(6.1)
    assert max_param_gap(np.array([0.2, 3.0, 6.1])) == pytest.approx(3.1)


@pytest.mark.parametrize("spec_t", [(2, 3, 0), (1, 1, -2), (2, 5, 2), (3, 2, 1)])
def test_certify_zero_set(spec_t):
    rep = certify_zero_set(make_knot_spec(*spec_t))
    assert rep.passed, rep.failures
    assert rep.forward_max_residual <= 1e-10
    assert rep.max_knot_distance <= 1e-6
    assert all(v > 0 for v in rep.min_offknot_field_norm.values())
    assert rep.coverage_max_gap <= 4 * math.pi / 256
    assert rep.summary()["n_candidates"] == rep.n_candidates


def test_floors_increase_with_delta(trefoil):
    m = certify_zero_set(trefoil).min_offknot_field_norm
    assert m[0.05] < m[0.1] < m[0.2]


def test_perturbed_field_fails_certification(trefoil):
    rep = certify_zero_set(trefoil, ZeroSetConfig(offset=(0.0, 0.0, 0.01)))
    assert not rep.passed
    assert any(f.startswith("forward") for f in rep.failures)
    assert rep.offending_points


def test_zero_threshold_is_degenerate(trefoil):
    rep = certify_zero_set(trefoil, ZeroSetConfig(threshold=0.0))
    assert rep.degenerate and not rep.passed
    assert rep.n_candidates == 0
