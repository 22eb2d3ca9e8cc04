import numpy as np
import pytest

from beltrami_knots.fieldlines import integrate_field_line, rk4_order_check, rk4_step
from beltrami_knots.fields import field_X
from beltrami_knots.geometry import annulus_value, make_knot_spec, torus_knot_point


def test_start_on_knot_is_stationary(trefoil):
    fl = integrate_field_line(trefoil, torus_knot_point(2, 3, 0.4).array())
    assert fl.stop_reason == "stationary" and fl.n_points == 1 and fl.warnings


def test_start_outside_gives_empty_polyline(trefoil):
    fl = integrate_field_line(trefoil, (0.0, 0.0, 0.0))
    assert fl.n_points == 0 and fl.stop_reason == "outside" and fl.warnings


def test_nontrivial_polyline_stays_in_domain(trefoil):
    fl = integrate_field_line(trefoil, (0.0, 1.25, 0.0), span=5.0)
    assert fl.n_points > 100
    R = np.sqrt(annulus_value(fl.points))
    assert np.all((R > 0.5) & (R < 1.5))
    # consecutive points are at most h * max|X| apart
    steps = np.linalg.norm(np.diff(fl.points, axis=0), axis=1)
    bound = fl.step * np.linalg.norm(field_X(fl.points, trefoil), axis=1).max()
    assert steps.max() <= 1.01 * bound
    assert fl.stop_reason in ("boundary", "span")


def test_span_end(trefoil):
    fl = integrate_field_line(trefoil, (0.0, 3.0, 0.0), step=1e-2, span=0.5)
    assert fl.stop_reason == "span" and fl.n_points == 51


def test_rk4_exact_for_constant_field_limit(trefoil):
    # a single RK4 step agrees with a fine Euler march to O(h^2)
    x = np.array([0.0, 3.0, 0.0])
    y = x.copy()
    for _ in range(1000):
        y = y + 1e-6 * field_X(y, trefoil)
    np.testing.assert_allclose(rk4_step(x, 1e-3, trefoil), y, atol=1e-8)


@pytest.mark.parametrize(
    "spec_t, start", [((2, 3, 0), (0.0, 3.0, 0.0)), ((2, 3, 0), (0.0, 2.5, 0.5)), ((2, 5, -2), (0.0, 1.25, 0.1))]
)
def test_fourth_order(spec_t, start):
    chk = rk4_order_check(make_knot_spec(*spec_t), start)
    assert chk.passed
    assert 12 <= chk.ratio <= 20


def test_order_check_round_off_floor(trefoil):
    chk = rk4_order_check(trefoil, (0.0, 1.25, 0.0))
    assert chk.passed and max(chk.differences) <= 1e-11


def test_invalid_step(trefoil):
    with pytest.raises(ValueError):
        integrate_field_line(trefoil, (0.0, 3.0, 0.0), step=0.0)
