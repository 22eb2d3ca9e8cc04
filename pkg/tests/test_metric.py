import numpy as np
import pytest
from hypothesis import given

from beltrami_knots.calculus import det3, identity_metric
from beltrami_knots.fields import field_X
from beltrami_knots.geometry import DomainError, make_knot_spec
from beltrami_knots.metric import (
    ConstructedMetric,
    christoffel,
    matrix_D,
    matrix_M,
    metric_derivatives,
    metric_g,
    pullback_oracle,
)
from beltrami_knots.sampling import sample_in_domain

from .conftest import FAMILY
from .strategies import annulus_points, specs


def test_worked_metric_at_3_0_0(trefoil):
    # hand-derived from D = dpsi^-1 and M at (3, 0, 0)
    mv = metric_g((3.0, 0.0, 0.0), trefoil)
    np.testing.assert_allclose(mv.g, [[1, 0, 0], [0, 5 / 9, -7 / 3], [0, -7 / 3, 10]], atol=1e-14)
    assert mv.det == pytest.approx(1 / 9, abs=1e-14)


def test_worked_metric_at_0_125_0(trefoil):
    # D = [[-0.8, 0, 0], [0, 0, -4/3], [0, -1, 0]] at (0, 1.25, 0)
    g = metric_g((0.0, 1.25, 0.0), trefoil).g
    np.testing.assert_allclose(g, [[3.2, 0, -112 / 15], [0, 1, 0], [-112 / 15, 0, 160 / 9]], atol=1e-13)


def test_matrix_M_trefoil(trefoil):
    M = matrix_M(trefoil)
    np.testing.assert_array_equal(M, [[5, -7, 0], [-7, 10, 0], [0, 0, 1]])
    assert M.dtype.kind == "i"


@given(specs)
def test_M_unimodular(spec_t):
    s = make_knot_spec(*spec_t)
    assert round(np.linalg.det(matrix_M(s).astype(float))) == 1


@pytest.mark.parametrize("spec_t", FAMILY)
def test_metric_matches_pullback_and_is_spd(spec_t):
    s = make_knot_spec(*spec_t)
    pts = sample_in_domain(300, seed=3)
    mv = metric_g(pts, s)
    np.testing.assert_allclose(mv.g, pullback_oracle(pts, s), rtol=0, atol=1e-9)
    assert mv.is_spd().all()
    np.testing.assert_allclose(mv.g, np.swapaxes(mv.g, -1, -2))


@given(specs, annulus_points())
def test_inverse_and_volume(spec_t, xyz):
    s = make_knot_spec(*spec_t)
    mv = metric_g(xyz, s)
    np.testing.assert_allclose(mv.inv @ mv.g, np.eye(3), atol=1e-7 * mv.cond())
    D = matrix_D(xyz)
    sd = ConstructedMetric(s).sqrt_det(*xyz)
    assert abs(sd) == pytest.approx(abs(np.linalg.det(D)), rel=1e-12)
    assert sd**2 == pytest.approx(mv.det, rel=1e-6 * mv.cond())


def test_metric_outside_domain(trefoil):
    with pytest.raises(DomainError):
        metric_g((2.0, 0.0, 0.0), trefoil)


def _fd_christoffel(pt, spec, h=1e-5):
    """Christoffel symbols from central differences of the metric itself."""
    pt = np.asarray(pt, dtype=float)
    dg = np.zeros((3, 3, 3))
    for m in range(3):
        e = np.zeros(3)
        e[m] = h
        dg[:, :, m] = (metric_g(pt + e, spec).g - metric_g(pt - e, spec).g) / (2 * h)
    ginv = np.linalg.inv(metric_g(pt, spec).g)
    low = 0.5 * (np.einsum("lkj->ljk", dg) + dg - np.einsum("jkl->ljk", dg))
    return np.einsum("il,ljk->ijk", ginv, low)


@pytest.mark.parametrize("spec_t, pt", [((2, 3, 0), (3.0, 0.2, 0.1)), ((1, 1, 2), (0.5, 2.6, -0.4))])
def test_christoffel_matches_finite_differences(spec_t, pt):
    s = make_knot_spec(*spec_t)
    G = christoffel(pt, s)
    ref = _fd_christoffel(pt, s)
    np.testing.assert_allclose(G, ref, atol=1e-6 * max(1.0, np.abs(ref).max()))
    np.testing.assert_allclose(G, np.swapaxes(G, -1, -2), atol=1e-9)


def test_christoffel_identity_metric_vanishes():
    G = christoffel(sample_in_domain(4, seed=0), metric=identity_metric)
    assert np.all(G == 0)


def test_metric_derivatives_shape(trefoil):
    dg = metric_derivatives(sample_in_domain(6, seed=2), trefoil)
    assert dg.shape == (6, 3, 3, 3)
    np.testing.assert_allclose(dg, np.swapaxes(dg, 1, 2))


def test_det3_nested():
    m = [[2.0, 0.0, 1.0], [0.0, 3.0, 0.0], [1.0, 0.0, 4.0]]
    assert det3(m) == pytest.approx(np.linalg.det(np.array(m)))


def test_metric_can_repeat_across_knot_types():
    # different (p, q) may share a metric; the fields still differ
    a, b = make_knot_spec(1, 1, -2), make_knot_spec(3, 2, 0)
    np.testing.assert_array_equal(matrix_M(a), matrix_M(b))
    pts = sample_in_domain(20, seed=8)
    np.testing.assert_allclose(metric_g(pts, a).g, metric_g(pts, b).g, atol=1e-12)
    assert np.abs(field_X(pts, a) - field_X(pts, b)).max() > 0.1
