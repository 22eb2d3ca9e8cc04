"""The metrics ``g_{p,q,k} = D^T M D`` on the annulus and their Levi-Civita data."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from . import jets
from .calculus import MetricFn, det3, jacobian, leading_minors
from .geometry import (
    CORE_RADIUS,
    DERIVATIVE_MARGIN,
    CartesianPoint,
    KnotSpec,
    require_in_domain,
    twist_inv_psi_inv,
)


def matrix_M(spec: KnotSpec) -> np.ndarray:
    """Constant Gram matrix of the inverse twist, integer entries, det 1."""
    p, q, b, d = spec.p, spec.q, spec.b, spec.d
    off = d * b - p * q
    return np.array([[d * d + p * p, off, 0], [off, b * b + q * q, 0], [0, 0, 1]], dtype=np.int64)


def _D_entries(pt: CartesianPoint):
    x, y, z = pt.x, pt.y, pt.z
    r = pt.r
    rm2 = r - CORE_RADIUS
    R2 = rm2 * rm2 + z * z
    R = jets.sqrt(R2)
    r2 = r * r
    zero = 0.0 * x
    return (
        (-y / r2, x / r2, zero),
        (-x * z / (r * R2), -z * y / (r * R2), rm2 / R2),
        (x * rm2 / (r * R), y * rm2 / (r * R), z / R),
    )


def matrix_D(pt) -> np.ndarray:
    """Jacobian of ``psi^-1`` written in Cartesian coordinates, shape (..., 3, 3)."""
    pt = require_in_domain(pt)
    return np.stack([jets.values(row) for row in _D_entries(pt)], axis=-2)


def metric_entries(pt: CartesianPoint, spec: KnotSpec):
    """Nested 3x3 tuple of ``g_ij`` (floats, arrays or jets); no domain check."""
    M = matrix_M(spec)
    D = _D_entries(pt)
    nonzero = [(a, b, float(M[a, b])) for a in range(3) for b in range(3) if M[a, b] != 0]
    # MD first, then D^T (MD); keeps the jet graph small
    MD = [[sum(m * D[b][j] for (a2, b, m) in nonzero if a2 == a) for j in range(3)] for a in range(3)]
    g = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            g[i][j] = sum(D[a][i] * MD[a][j] for a in range(3))
            g[j][i] = g[i][j]
    return tuple(tuple(row) for row in g)


@dataclass(frozen=True)
class ConstructedMetric:
    """Callable ``(x, y, z) -> g_ij`` that also knows its volume density.

    ``sqrt(det g) = |det D| sqrt(det M)`` with ``det M = 1``; evaluating it
    from ``D`` avoids the cancellation in a 3x3 determinant of a badly
    conditioned ``g``.
    """

    spec: KnotSpec

    def __call__(self, x, y, z):
        return metric_entries(CartesianPoint(x, y, z), self.spec)

    def sqrt_det(self, x, y, z):
        det_d = det3(_D_entries(CartesianPoint(x, y, z)))
        # det M = (p b + q d)^2 = 1 exactly
        return det_d * np.sign(jets.primal(det_d))


def metric_fn(spec: KnotSpec) -> ConstructedMetric:
    return ConstructedMetric(spec)


@dataclass(frozen=True)
class MetricValue:
    """Evaluated metric(s), ``g`` of shape (..., 3, 3)."""

    g: np.ndarray

    @cached_property
    def det(self) -> np.ndarray:
        return det3([[self.g[..., i, j] for j in range(3)] for i in range(3)])

    @cached_property
    def inv(self) -> np.ndarray:
        """Adjugate over determinant (symmetric input)."""
        g = self.g
        cof = np.empty_like(g)
        for i in range(3):
            for j in range(3):
                r = [k for k in range(3) if k != i]
                c = [k for k in range(3) if k != j]
                minor = g[..., r[0], c[0]] * g[..., r[1], c[1]] - g[..., r[0], c[1]] * g[..., r[1], c[0]]
                cof[..., i, j] = (-1) ** (i + j) * minor
        return np.swapaxes(cof, -1, -2) / self.det[..., None, None]

    @property
    def minors(self) -> np.ndarray:
        return leading_minors(self.g)

    def is_spd(self) -> np.ndarray:
        return np.all(self.minors > 0, axis=-1)

    def cond(self) -> np.ndarray:
        """2-norm condition number (reporting only)."""
        w = np.linalg.eigvalsh(self.g)
        return w[..., -1] / w[..., 0]


def metric_g(pt, spec: KnotSpec) -> MetricValue:
    pt = require_in_domain(pt)
    g = np.stack([jets.values(row) for row in metric_entries(pt, spec)], axis=-2)
    return MetricValue(g)


def pullback_oracle(pt, spec: KnotSpec) -> np.ndarray:
    """``J^T J`` with ``J`` the jet Jacobian of ``(psi o twist)^-1``."""
    arr = require_in_domain(pt).array()

    def inverse_map(x, y, z):
        P = twist_inv_psi_inv(CartesianPoint(x, y, z), spec)
        return P.a, P.c, P.t

    J = jacobian(inverse_map, arr)
    return np.einsum("...ki,...kj->...ij", J, J)


def christoffel(pt, spec: KnotSpec | None = None, metric: MetricFn | None = None, guard: Callable | None = None):
    """Christoffel symbols ``Gamma[..., i, j, k]`` of the Levi-Civita connection.

    ``Gamma^i_jk = 1/2 g^il (d_j g_lk + d_k g_lj - d_l g_jk)`` with metric
    derivatives from jets. Pass ``metric`` to override the constructed one
    (e.g. :func:`~beltrami_knots.calculus.identity_metric`).
    """
    if metric is None:
        if spec is None:
            raise ValueError("need a spec or an explicit metric")
        metric = metric_fn(spec)
        arr = require_in_domain(pt, DERIVATIVE_MARGIN).array()
    else:
        arr = np.asarray(pt.array() if isinstance(pt, CartesianPoint) else pt, dtype=float)
        if guard is not None:
            guard(arr)
    xyz = jets.variables(arr[..., 0], arr[..., 1], arr[..., 2])
    G = metric(*xyz)
    shape = arr.shape[:-1]
    gv = np.broadcast_to(np.stack([jets.values(row) for row in G], axis=-2), shape + (3, 3))
    # dg[..., l, k, j] = d_j g_lk
    dg = np.stack(
        [np.stack([np.broadcast_to(jets.gradient(G[l][k]), shape + (3,)) for k in range(3)], axis=-2) for l in range(3)],
        axis=-3,
    )
    lowered = 0.5 * (
        np.einsum("...lkj->...ljk", dg) + np.einsum("...ljk->...ljk", dg) - np.einsum("...jkl->...ljk", dg)
    )
    return np.einsum("...il,...ljk->...ijk", MetricValue(np.array(gv)).inv, lowered)


def metric_derivatives(pt, spec: KnotSpec) -> np.ndarray:
    """``dg[..., i, j, m] = d_m g_ij`` from jets."""
    arr = require_in_domain(pt, DERIVATIVE_MARGIN).array()
    G = metric_fn(spec)(*jets.variables(arr[..., 0], arr[..., 1], arr[..., 2]))
    return np.stack([np.stack([jets.gradient(G[i][j]) for j in range(3)], axis=-2) for i in range(3)], axis=-3)
