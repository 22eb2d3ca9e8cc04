"""The base curl eigenfield on the flat model and its transported family.

``field_X`` is the closed form in Cartesian coordinates (fast path) and
``pushforward_oracle`` recomputes the same vector by pushing the base field
forward through the jet Jacobian of ``psi o twist`` (independent path).
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from . import jets
from .geometry import (
    CORE_RADIUS,
    CartesianPoint,
    KnotSpec,
    ToroidalPoint,
    psi_inv,
    psi_twist,
    require_in_domain,
    twist_inv,
)

NORMALIZATION_TOL = 1e-12


def base_field_B(P: ToroidalPoint) -> tuple:
    """``(cos(t - 1) - cos c, sin(1 - t), -sin c)`` in flat coordinates ``(a, c, t)``."""
    return (
        jets.cos(P.t - 1.0) - jets.cos(P.c),
        jets.sin(1.0 - P.t),
        -jets.sin(P.c),
    )


def base_field(P: ToroidalPoint) -> np.ndarray:
    return jets.values(base_field_B(P))


def multiple_angle_eval(q: int, cos_c, sin_c, check: bool = True):
    """``(cos(q c), sin(q c))`` from ``(cos c, sin c)`` by the angle-addition recurrence.

    Avoids any inverse trig, so it is free of branch cuts and differentiable
    through jets.
    """
    if q < 1:
        raise ValueError(f"multiple must be a positive integer, got {q}")
    if check:
        c0, s0 = np.asarray(jets.primal(cos_c)), np.asarray(jets.primal(sin_c))
        err = np.abs(c0 * c0 + s0 * s0 - 1.0)
        if np.any(err > NORMALIZATION_TOL):
            raise ValueError(f"(cos, sin) pair not normalised: max |c^2 + s^2 - 1| = {err.max():.3g}")
    cn, sn = cos_c, sin_c
    for _ in range(q - 1):
        cn, sn = cn * cos_c - sn * sin_c, sn * cos_c + cn * sin_c
    return cn, sn


def _components(p: int, q: int, cos_a, sin_a, cos_c, sin_c, t, check: bool = True):
    cqc, sqc = multiple_angle_eval(q, cos_c, sin_c, check)
    cpa, spa = multiple_angle_eval(p, cos_a, sin_a, check)
    x1 = jets.cos(t - 1.0) - (cqc * cpa + sqc * spa)
    x2 = jets.sin(1.0 - t)
    x3 = cqc * spa - sqc * cpa
    return x1, x2, x3


def components_X(P: ToroidalPoint, spec: KnotSpec) -> tuple:
    """The three scalars ``(X1, X2, X3)`` multiplying the frame at ``psi(P)``.

    They depend only on ``(p, q)``; ``t`` plays the role of ``R``.
    """
    return _components(spec.p, spec.q, jets.cos(P.a), jets.sin(P.a), jets.cos(P.c), jets.sin(P.c), P.t)


def components_from_cartesian(pt: CartesianPoint, p: int, q: int, check: bool = True) -> tuple:
    r = pt.r
    R = jets.hypot(r - CORE_RADIUS, pt.z)
    return _components(p, q, pt.x / r, pt.y / r, (r - CORE_RADIUS) / R, pt.z / R, R, check)


def frame(pt: CartesianPoint) -> tuple:
    """Pushforwards ``(e_a, e_c, e_t)`` of the flat coordinate basis, as 3-tuples."""
    x, y, z = pt.x, pt.y, pt.z
    r = pt.r
    R = jets.hypot(r - CORE_RADIUS, z)
    rm2 = r - CORE_RADIUS
    e_a = (-y, x, 0.0 * x)
    e_c = (-z * x / r, -z * y / r, rm2)
    e_t = (x * rm2 / (r * R), y * rm2 / (r * R), z / R)
    return e_a, e_c, e_t


def frame_matrix(pt) -> np.ndarray:
    """Columns ``e_a, e_c, e_t`` as an array of shape (..., 3, 3)."""
    pt = require_in_domain(pt)
    return np.stack([jets.values(e) for e in frame(pt)], axis=-1)


def combine(spec: KnotSpec, comps: tuple, pt: CartesianPoint) -> tuple:
    x1, x2, x3 = comps
    e_a, e_c, e_t = frame(pt)
    ca = spec.q * x1 - spec.b * x2
    cc = spec.p * x1 + spec.d * x2
    return tuple(ca * e_a[i] + cc * e_c[i] + x3 * e_t[i] for i in range(3))


def field_X_components(pt: CartesianPoint, spec: KnotSpec) -> tuple:
    """Closed-form field as a 3-tuple; works on arrays and jets without domain checks."""
    return combine(spec, components_from_cartesian(pt, spec.p, spec.q), pt)


def field_X(pt, spec: KnotSpec) -> np.ndarray:
    """Closed-form ``X_{p,q,k}`` at Cartesian point(s), shape (..., 3)."""
    pt = require_in_domain(pt)
    return jets.values(field_X_components(pt, spec))


def field_fn(spec: KnotSpec) -> Callable:
    """``(x, y, z) -> (X^1, X^2, X^3)`` for the calculus operators."""

    def fn(x, y, z):
        return field_X_components(CartesianPoint(x, y, z), spec)

    return fn


def trefoil_components(pt) -> np.ndarray:
    """Rational-trigonometric closed forms of ``(X1, X2, X3)`` for ``(p, q) = (2, 3)``.

    The third component carries ``z / R`` in front of its middle bracket.
    """
    pt = require_in_domain(pt)
    return jets.values(_trefoil(pt))


def _trefoil(pt: CartesianPoint) -> tuple:
    x, y, z = pt.x, pt.y, pt.z
    r = pt.r
    R = jets.hypot(r - CORE_RADIUS, z)
    rm2 = r - CORE_RADIUS
    r2, R2 = r * r, R * R
    R3 = R2 * R
    x1 = (
        jets.cos(R - 1.0)
        + 3.0 * x * x * z * z * rm2 / (r2 * R3)
        + rm2 / R * (y * y / r2 * (2.0 - 5.0 * z * z / R2) - rm2 * rm2 / R2)
        - 2.0 * x * y * z / (r2 * R) * (4.0 * rm2 * rm2 / R2 - 1.0)
    )
    x2 = jets.sin(1.0 - R)
    x3 = (
        x * x * z**3 / (r2 * R3)
        + z / R * (y * y / r2 * (7.0 * rm2 * rm2 / R2 - 1.0) - 3.0 * rm2 * rm2 / R2)
        + 2.0 * x * y * rm2 / (r2 * R) * (1.0 - 4.0 * z * z / R2)
    )
    return x1, x2, x3


def trefoil_field_X(pt, spec: KnotSpec) -> np.ndarray:
    """``X_{2,3,k}`` assembled from the trefoil closed forms."""
    if (spec.p, spec.q) != (2, 3):
        raise ValueError(f"trefoil closed forms need (p, q) = (2, 3), got ({spec.p}, {spec.q})")
    pt = require_in_domain(pt)
    return jets.values(combine(spec, _trefoil(pt), pt))


def pushforward_oracle(pt, spec: KnotSpec) -> np.ndarray:
    """``(psi o twist)_* B`` evaluated via the jet Jacobian at the preimage point."""
    pt = require_in_domain(pt)
    P0 = twist_inv(psi_inv(pt), spec)
    a, c, t = jets.variables(P0.a, P0.c, P0.t)
    image = psi_twist(ToroidalPoint(a, c, t), spec)
    J = jets.jacobian_matrix((image.x, image.y, image.z))
    B = base_field(P0)
    return np.einsum("...ij,...j->...i", J, B)


def perturbed_field(spec: KnotSpec, eps: float = 0.01) -> Callable:
    """Test hook: ``X + eps * e_z``, a field whose zero set is no longer the knot."""

    def fn(pt):
        X = field_X(pt, spec)
        X[..., 2] += eps
        return X

    return fn

