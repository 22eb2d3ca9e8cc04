"""Metric-aware curl and divergence, map Jacobians and a finite-difference oracle.

All derivatives come from running closed-form code on :mod:`jets`. Fields
and metrics are passed as callables ``(x, y, z) -> components`` so the same
operators serve the flat model and the annulus.

Coordinate realisation (right-handed, ``eps_123 = +1``)::

    (curl X)^i = eps^{ijk} d_j (g_kl X^l) / sqrt(det g)
    div X      = d_i (sqrt(det g) X^i) / sqrt(det g)
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from . import jets
from .geometry import (
    DERIVATIVE_MARGIN,
    CartesianPoint,
    DomainError,
    KnotSpec,
    ToroidalPoint,
    psi,
    psi_inv,
    psi_twist,
    require_in_domain,
    twist,
    twist_inv,
    twist_inv_psi_inv,
)

FieldFn = Callable[..., Sequence]
MetricFn = Callable[..., Sequence[Sequence]]

FD_STEP = 1e-5


def _coords(pt) -> np.ndarray:
    if isinstance(pt, (CartesianPoint, ToroidalPoint)):
        return pt.array()
    arr = np.asarray(pt, dtype=float)
    if arr.shape[-1] != 3:
        raise ValueError(f"expected trailing dimension 3, got shape {arr.shape}")
    return arr


def annulus_guard(margin: float = DERIVATIVE_MARGIN) -> Callable[[np.ndarray], None]:
    """Domain check for evaluations on the annulus."""

    def guard(pts: np.ndarray) -> None:
        require_in_domain(pts, margin)

    return guard


def identity_metric(x, y, z):
    one = 1.0 + 0.0 * jets.primal(x)
    zero = 0.0 * jets.primal(x)
    return ((one, zero, zero), (zero, one, zero), (zero, zero, one))


def det3(m):
    """Cofactor determinant of a 3x3 nested sequence (floats, arrays or jets)."""
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def leading_minors(g: np.ndarray) -> np.ndarray:
    """The three leading principal minors of (..., 3, 3) matrices, shape (..., 3)."""
    m1 = g[..., 0, 0]
    m2 = g[..., 0, 0] * g[..., 1, 1] - g[..., 0, 1] * g[..., 1, 0]
    m3 = det3([[g[..., i, j] for j in range(3)] for i in range(3)])
    return np.stack([m1, m2, m3], axis=-1)


def require_spd(g: np.ndarray) -> None:
    minors = leading_minors(g)
    if not np.all(minors > 0):
        raise ValueError(f"metric is not positive definite (min leading minor {minors.min():.3g})")


def _seeded(pt, domain):
    arr = _coords(pt)
    if domain is not None:
        domain(arr)
    return arr, jets.variables(arr[..., 0], arr[..., 1], arr[..., 2])


def _metric_jets(metric: MetricFn | None, xyz):
    if metric is None:
        return None
    return metric(*xyz)


def _sqrt_det(metric, G, xyz):
    # metrics may supply a better-conditioned volume density
    if hasattr(metric, "sqrt_det"):
        return metric.sqrt_det(*xyz)
    return jets.sqrt(det3(G))


def curl_g(
    field: FieldFn,
    metric: MetricFn | None,
    pt,
    domain: Callable | None = None,
    orientation: int = 1,
) -> np.ndarray:
    """Curl of ``field`` with respect to ``metric`` (``None`` means Euclidean).

    ``orientation=-1`` flips the volume form; it exists only so tests can
    confirm the sign convention is actually exercised.
    """
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    arr, xyz = _seeded(pt, domain)
    X = field(*xyz)
    G = _metric_jets(metric, xyz)
    if G is None:
        omega = X
        sqrt_det = np.ones(arr.shape[:-1])
    else:
        gv = np.stack([jets.values(row) for row in G], axis=-2)
        gv = np.broadcast_to(gv, arr.shape[:-1] + (3, 3))
        require_spd(gv)
        omega = [sum(G[k][l] * X[l] for l in range(3)) for k in range(3)]
        sqrt_det = np.broadcast_to(jets.primal(_sqrt_det(metric, G, xyz)), arr.shape[:-1])
    d = [jets.gradient(w) for w in omega]  # d[k][..., j] = d_j omega_k
    curl = np.stack(
        [
            d[2][..., 1] - d[1][..., 2],
            d[0][..., 2] - d[2][..., 0],
            d[1][..., 0] - d[0][..., 1],
        ],
        axis=-1,
    )
    return orientation * curl / sqrt_det[..., None]


def div_g(field: FieldFn, metric: MetricFn | None, pt, domain: Callable | None = None) -> np.ndarray:
    """Riemannian divergence ``d_i(sqrt(g) X^i) / sqrt(g)``."""
    arr, xyz = _seeded(pt, domain)
    X = field(*xyz)
    G = _metric_jets(metric, xyz)
    if G is None:
        return sum(jets.gradient(X[i])[..., i] for i in range(3)) + np.zeros(arr.shape[:-1])
    gv = np.broadcast_to(np.stack([jets.values(row) for row in G], axis=-2), arr.shape[:-1] + (3, 3))
    require_spd(gv)
    sg = _sqrt_det(metric, G, xyz)
    total = sum(jets.gradient(sg * X[i])[..., i] for i in range(3))
    return total / jets.primal(sg)


def field_values(field: FieldFn, pt) -> np.ndarray:
    arr = _coords(pt)
    return jets.values(field(arr[..., 0], arr[..., 1], arr[..., 2]))


def jacobian(fn: Callable, pt, domain: Callable | None = None) -> np.ndarray:
    """Jacobian ``d fn_i / d x_j`` of a map ``(u, v, w) -> 3 components``."""
    arr, xyz = _seeded(pt, domain)
    return np.broadcast_to(jets.jacobian_matrix(fn(*xyz)), arr.shape[:-1] + (3, 3))


def _map_table(spec: KnotSpec | None) -> dict[str, Callable]:
    def needs_spec():
        if spec is None:
            raise ValueError("this map needs a KnotSpec")
        return spec

    def as_tuple(p):
        return (p.a, p.c, p.t) if isinstance(p, ToroidalPoint) else (p.x, p.y, p.z)

    return {
        "psi": lambda a, c, t: as_tuple(psi(ToroidalPoint(a, c, t))),
        "psi_inv": lambda x, y, z: as_tuple(psi_inv(CartesianPoint(x, y, z), check=False)),
        "twist": lambda a, c, t: as_tuple(twist(ToroidalPoint(a, c, t), needs_spec(), wrap=False)),
        "twist_inv": lambda a, c, t: as_tuple(twist_inv(ToroidalPoint(a, c, t), needs_spec(), wrap=False)),
        "psi_twist": lambda a, c, t: as_tuple(psi_twist(ToroidalPoint(a, c, t), needs_spec())),
        "psi_twist_inv": lambda x, y, z: as_tuple(twist_inv_psi_inv(CartesianPoint(x, y, z), needs_spec())),
    }


CARTESIAN_SOURCE_MAPS = ("psi_inv", "psi_twist_inv")
MAP_NAMES = ("psi", "psi_inv", "twist", "twist_inv", "psi_twist", "psi_twist_inv")


def jacobian_of_map(name: str, point, spec: KnotSpec | None = None) -> np.ndarray:
    """Jacobian of one of the coordinate maps; entry (i, j) is d(out_i)/d(in_j).

    Maps with a Cartesian source (``psi_inv``, ``psi_twist_inv``) reject
    points outside the annulus; maps on the flat model reject ``t`` outside
    (1/2, 3/2).
    """
    table = _map_table(spec)
    if name not in table:
        raise KeyError(f"unknown map {name!r}; expected one of {MAP_NAMES}")
    arr = _coords(point)
    if name in CARTESIAN_SOURCE_MAPS:
        require_in_domain(arr)
    elif not np.all((arr[..., 2] > 0.5) & (arr[..., 2] < 1.5)):
        raise DomainError("flat-model radial coordinate outside (1/2, 3/2)")
    return jacobian(table[name], arr)


def fd_derivative_oracle(
    scalar: Callable[[np.ndarray], np.ndarray],
    pt,
    axis: int,
    h: float = FD_STEP,
    domain: Callable | None = None,
) -> np.ndarray:
    """Central difference ``(f(x + h e_i) - f(x - h e_i)) / 2h``; error O(h^2).

    ``domain`` is checked with the stencil margin ``h`` already applied.
    """
    arr = _coords(pt)
    if domain is not None:
        domain(arr, h)
    step = np.zeros(3)
    step[axis] = h
    return (np.asarray(scalar(arr + step)) - np.asarray(scalar(arr - step))) / (2 * h)


def annulus_stencil_guard(pts: np.ndarray, h: float) -> None:
    require_in_domain(pts, DERIVATIVE_MARGIN + h)
