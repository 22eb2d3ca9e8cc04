"""Bezout data, torus knots, the toroidal annulus and its coordinate maps.

Points are small dataclasses whose coordinates may be floats, numpy arrays
of matching shape (many points at once) or :class:`~beltrami_knots.jets.Jet`
objects, so every map here is also differentiable through the jet layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from . import jets
from .jets import primal

INNER_RADIUS = 0.5
OUTER_RADIUS = 1.5
CORE_RADIUS = 2.0
# derivative-based evaluations stay this far inside the open annulus
DERIVATIVE_MARGIN = 1e-9
ANGLE_TOL = 1e-12


class DomainError(ValueError):
    """A point lies outside the open solid toroidal annulus (or too close to its boundary)."""


def ext_gcd_coeffs(p: int, q: int) -> tuple[int, int]:
    """Bezout coefficients ``(b0, d0)`` with ``p*b0 + q*d0 == 1``.

    Textbook recursion: ``egcd(a, 0) = (a, 1, 0)`` and
    ``egcd(a, b) = (g, y, x - (a // b) * y)`` where ``(g, x, y) = egcd(b, a % b)``.
    """
    for name, v in (("p", p), ("q", q)):
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
            raise TypeError(f"{name} must be an integer, got {v!r}")
        if v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v}")
    p, q = int(p), int(q)
    if math.gcd(p, q) != 1:
        raise ValueError(f"p={p} and q={q} are not coprime")

    def egcd(a: int, b: int) -> tuple[int, int, int]:
        if b == 0:
            return a, 1, 0
        g, x, y = egcd(b, a % b)
        return g, y, x - (a // b) * y

    _, b0, d0 = egcd(p, q)
    return b0, d0


@dataclass(frozen=True)
class KnotSpec:
    """Integer data ``(p, q, k, b_k, d_k)`` for one member of the constructed family."""

    p: int
    q: int
    k: int
    b: int
    d: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1 or math.gcd(self.p, self.q) != 1:
            raise ValueError(f"(p, q) = ({self.p}, {self.q}) must be positive and coprime")
        if self.p * self.b + self.q * self.d != 1:
            raise ValueError(f"Bezout identity fails for {self}")
        b0, d0 = ext_gcd_coeffs(self.p, self.q)
        if self.b != b0 + self.k * self.q or self.d != d0 - self.k * self.p:
            raise ValueError(f"(b, d) do not match the k-shift of ({b0}, {d0})")

    @property
    def twist_matrix(self) -> np.ndarray:
        """Angular part of the twist, ``[[q, -b], [p, d]]`` (unimodular)."""
        return np.array([[self.q, -self.b], [self.p, self.d]])

    @property
    def twist_inverse_matrix(self) -> np.ndarray:
        return np.array([[self.d, self.b], [-self.p, self.q]])

    def label(self) -> str:
        return f"p={self.p},q={self.q},k={self.k}"


def make_knot_spec(p: int, q: int, k: int = 0) -> KnotSpec:
    b0, d0 = ext_gcd_coeffs(p, q)
    k = int(k)
    return KnotSpec(int(p), int(q), k, b0 + k * q, d0 - k * p)


def wrap_angle(a):
    """Canonical representative in (-pi, pi]."""
    return np.pi - np.remainder(np.pi - np.asarray(a, dtype=float), 2 * np.pi)


def angle_diff(a, b):
    """Signed difference ``a - b`` reduced to (-pi, pi]."""
    return wrap_angle(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))


def angles_close(a, b, tol: float = ANGLE_TOL) -> bool:
    return bool(np.all(np.abs(angle_diff(a, b)) <= tol))


@dataclass(frozen=True)
class ToroidalPoint:
    """Point ``([a], [c], t)`` on the flat model; ``a``, ``c`` are angles mod 2 pi."""

    a: Any
    c: Any
    t: Any

    def canonical(self) -> "ToroidalPoint":
        return ToroidalPoint(wrap_angle(primal(self.a)), wrap_angle(primal(self.c)), self.t)

    def isclose(self, other: "ToroidalPoint", tol: float = ANGLE_TOL) -> bool:
        return (
            angles_close(primal(self.a), primal(other.a), tol)
            and angles_close(primal(self.c), primal(other.c), tol)
            and bool(np.all(np.abs(np.asarray(primal(self.t)) - np.asarray(primal(other.t))) <= tol))
        )

    def array(self) -> np.ndarray:
        return jets.values((self.a, self.c, self.t))


@dataclass(frozen=True)
class CartesianPoint:
    """Point ``(x, y, z)`` of R^3 with derived radii ``r`` and ``R``."""

    x: Any
    y: Any
    z: Any

    @classmethod
    def from_array(cls, pts) -> "CartesianPoint":
        arr = np.asarray(pts, dtype=float)
        if arr.shape[-1] != 3:
            raise ValueError(f"expected trailing dimension 3, got shape {arr.shape}")
        return cls(arr[..., 0], arr[..., 1], arr[..., 2])

    @property
    def r(self):
        """Distance from the z-axis."""
        return jets.hypot(self.x, self.y)

    @property
    def R(self):
        """Distance from the core circle of radius 2 in the xy-plane."""
        return jets.hypot(self.r - CORE_RADIUS, self.z)

    def array(self) -> np.ndarray:
        return jets.values((self.x, self.y, self.z))


def as_cartesian(pt) -> CartesianPoint:
    """Accept a :class:`CartesianPoint` or anything array-like with trailing dimension 3."""
    if isinstance(pt, CartesianPoint):
        return pt
    return CartesianPoint.from_array(pt)


def annulus_value(pt) -> np.ndarray:
    """``(r - 2)^2 + z^2``, the squared tube radius."""
    pt = as_cartesian(pt)
    x, y, z = (np.asarray(primal(v), dtype=float) for v in (pt.x, pt.y, pt.z))
    return (np.hypot(x, y) - CORE_RADIUS) ** 2 + z**2


def in_annulus(pt):
    """Strict test ``1/4 < (r - 2)^2 + z^2 < 9/4``; elementwise for arrays."""
    v = annulus_value(pt)
    out = (v > INNER_RADIUS**2) & (v < OUTER_RADIUS**2)
    return bool(out) if np.ndim(out) == 0 else out


def tube_radius_in_range(R, margin: float = 0.0):
    R = np.asarray(primal(R), dtype=float)
    return (R > INNER_RADIUS + margin) & (R < OUTER_RADIUS - margin)


def require_in_domain(pt, margin: float = 0.0) -> CartesianPoint:
    """Raise :class:`DomainError` unless every point has ``R`` in (0.5 + margin, 1.5 - margin)."""
    pt = as_cartesian(pt)
    R = np.sqrt(annulus_value(pt))
    ok = tube_radius_in_range(R, margin)
    if not np.all(ok):
        bad = np.asarray(R)[~np.asarray(ok)] if np.ndim(ok) else np.asarray([R])
        raise DomainError(
            f"{np.size(bad)} point(s) outside the annulus (margin {margin:g}); first R = {bad.flat[0]:.17g}"
        )
    return pt


def torus_knot_point(p: int, q: int, t) -> CartesianPoint:
    """The (p, q) torus knot ``(cos qt (2 + cos pt), sin qt (2 + cos pt), sin pt)``."""
    rho = 2.0 + jets.cos(p * t)
    return CartesianPoint(jets.cos(q * t) * rho, jets.sin(q * t) * rho, jets.sin(p * t))


def psi(P: ToroidalPoint) -> CartesianPoint:
    """Flat model to annulus: ``(cos a (2 + t cos c), sin a (2 + t cos c), t sin c)``."""
    rho = 2.0 + P.t * jets.cos(P.c)
    return CartesianPoint(jets.cos(P.a) * rho, jets.sin(P.a) * rho, P.t * jets.sin(P.c))


def psi_inv(pt, check: bool = True) -> ToroidalPoint:
    """Inverse of :func:`psi`: ``a = atan2(y, x)``, ``c = atan2(z, r - 2)``, ``t = R``."""
    pt = as_cartesian(pt)
    if check:
        require_in_domain(pt)
    r = pt.r
    a = jets.atan2(pt.y, pt.x)
    c = jets.atan2(pt.z, r - CORE_RADIUS)
    return ToroidalPoint(a, c, jets.hypot(r - CORE_RADIUS, pt.z))


def twist(P: ToroidalPoint, spec: KnotSpec, wrap: bool = True) -> ToroidalPoint:
    """``([q a - b c], [p a + d c], t)``; angles reduced mod 2 pi unless ``wrap=False``."""
    a = spec.q * P.a - spec.b * P.c
    c = spec.p * P.a + spec.d * P.c
    if wrap:
        a, c = wrap_angle(primal(a)), wrap_angle(primal(c))
    return ToroidalPoint(a, c, P.t)


def twist_inv(P: ToroidalPoint, spec: KnotSpec, wrap: bool = True) -> ToroidalPoint:
    """Integer inverse of :func:`twist`: ``([d a + b c], [-p a + q c], t)``."""
    a = spec.d * P.a + spec.b * P.c
    c = -spec.p * P.a + spec.q * P.c
    if wrap:
        a, c = wrap_angle(primal(a)), wrap_angle(primal(c))
    return ToroidalPoint(a, c, P.t)


def psi_twist(P: ToroidalPoint, spec: KnotSpec) -> CartesianPoint:
    """``psi o twist`` without angle wrapping, so it can carry jets."""
    return psi(twist(P, spec, wrap=False))


def twist_inv_psi_inv(pt: CartesianPoint, spec: KnotSpec) -> ToroidalPoint:
    """``(psi o twist)^-1`` without angle wrapping or domain checks (jet friendly)."""
    return twist_inv(psi_inv(pt, check=False), spec, wrap=False)


def knot_preimage(x) -> ToroidalPoint:
    """Points ``([x], [0], 1)`` of the zero set of the base field."""
    x = np.asarray(x, dtype=float)
    return ToroidalPoint(x, np.zeros_like(x), np.ones_like(x))
