import math

import numpy as np
import pytest
from hypothesis import given

from beltrami_knots.fields import (
    base_field,
    components_X,
    field_X,
    multiple_angle_eval,
    perturbed_field,
    pushforward_oracle,
    trefoil_components,
    trefoil_field_X,
)
from beltrami_knots.geometry import DomainError, ToroidalPoint, make_knot_spec, psi_inv, torus_knot_point, twist_inv
from beltrami_knots.sampling import sample_in_domain

from .conftest import FAMILY
from .strategies import annulus_points, specs

# frozen from the pushforward oracle (jet Jacobian of psi o twist applied to B)
FROZEN = [
    ((2, 3, 0), (0.0, 1.25, 0.0), (-0.19267653048307140, 0.0, -0.13892160200685930)),
    ((2, 5, -2), (2.3, 0.7, 0.45), (-11.704496072057578, 30.887956562961286, 2.5793169344871636)),
    ((1, 1, 1), (-1.0, -2.2, 0.8), (4.841228872988949, -0.42137361877375046, 0.7832019159160681)),
]


@pytest.mark.parametrize("spec_t, pt, expected", FROZEN)
def test_frozen_values(spec_t, pt, expected):
    np.testing.assert_allclose(field_X(pt, make_knot_spec(*spec_t)), expected, rtol=1e-12, atol=1e-14)


def test_base_field_values():
    # B(a, c, t) = (cos(t - 1) - cos c, sin(1 - t), -sin c)
    np.testing.assert_allclose(base_field(ToroidalPoint(0.3, 0.0, 1.0)), [0.0, 0.0, 0.0], atol=0)
    np.testing.assert_allclose(
        base_field(ToroidalPoint(0.0, math.pi / 2, 0.5)), [math.cos(0.5), math.sin(0.5), -1.0], atol=1e-15
    )


@given(specs, annulus_points())
def test_components_equal_base_field_at_preimage(spec_t, xyz):
    s = make_knot_spec(*spec_t)
    P = psi_inv(xyz)
    P0 = twist_inv(P, s)
    # the scalar coefficients at psi(P) are B evaluated at the twisted preimage
    np.testing.assert_allclose(np.array(components_X(P, s), dtype=float), base_field(P0), atol=1e-12)


@pytest.mark.parametrize("spec_t", FAMILY)
def test_closed_form_matches_pushforward(spec_t):
    s = make_knot_spec(*spec_t)
    pts = sample_in_domain(200, seed=7)
    np.testing.assert_allclose(field_X(pts, s), pushforward_oracle(pts, s), rtol=0, atol=1e-10)


@given(annulus_points())
def test_trefoil_closed_form(xyz):
    s = make_knot_spec(2, 3, 0)
    np.testing.assert_allclose(trefoil_field_X(xyz, s), field_X(xyz, s), atol=1e-12)


def test_trefoil_components_shape():
    pts = sample_in_domain(5, seed=1)
    assert trefoil_components(pts).shape == (5, 3)


def test_multiple_angle_recurrence():
    c = np.linspace(-3, 3, 11)
    for q in (1, 2, 3, 5):
        cq, sq = multiple_angle_eval(q, np.cos(c), np.sin(c))
        np.testing.assert_allclose(cq, np.cos(q * c), atol=1e-13)
        np.testing.assert_allclose(sq, np.sin(q * c), atol=1e-13)
    with pytest.raises(ValueError):
        multiple_angle_eval(2, 1.0, 1.0)


@pytest.mark.parametrize("spec_t", [(2, 3, 0), (2, 5, 2), (1, 1, -2)])
def test_field_vanishes_on_knot(spec_t):
    s = make_knot_spec(*spec_t)
    t = np.linspace(0, 2 * math.pi, 500)
    X = field_X(torus_knot_point(s.p, s.q, t).array(), s)
    assert np.abs(X).max() <= 1e-12


def test_field_rejects_outside_points(trefoil):
    with pytest.raises(DomainError):
        field_X((0.0, 0.0, 0.0), trefoil)


def test_perturbed_field_no_longer_vanishes(trefoil):
    knot = torus_knot_point(2, 3, np.linspace(0, 6, 10)).array()
    np.testing.assert_allclose(perturbed_field(trefoil, 0.01)(knot)[:, 2], 0.01, atol=1e-12)
