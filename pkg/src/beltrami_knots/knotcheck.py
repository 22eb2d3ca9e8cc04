"""Sampled checks of the tameness clauses for the torus knot.

Closure, injectivity at sample resolution, unit speed after arc-length
reparametrisation and finite total curvature, both for the Euclidean metric
and for ``g_{p,q,k}`` (geodesic curvature through the Christoffel symbols).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson
from scipy.spatial import cKDTree

from . import jets
from .calculus import MetricFn
from .geometry import KnotSpec, torus_knot_point
from .metric import christoffel, metric_fn

TWO_PI = 2.0 * math.pi
DENSE = 1024
FD_STEP = 1e-3
INJECTIVITY_TOL = 1e-6


def curve_derivatives(p: int, q: int, t) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(T(t), T'(t), T''(t))`` for the (p, q) torus knot, each shape (..., 3)."""

    def fn(s):
        pt = torus_knot_point(p, q, s)
        return pt.x, pt.y, pt.z

    return jets.taylor2(fn, np.asarray(t, dtype=float))


class ArcLength:
    """Arc length ``S(t)`` of a closed curve from the Fourier series of its speed.

    ``speed`` must be 2 pi-periodic and smooth; the trigonometric interpolant
    on ``n_dense`` nodes is integrated term by term.
    """

    def __init__(self, speed: Callable[[np.ndarray], np.ndarray], n_dense: int = DENSE):
        self.speed = speed
        nodes = np.arange(n_dense) * (TWO_PI / n_dense)
        c = np.fft.rfft(speed(nodes)) / n_dense
        self._c0 = c[0].real
        k = np.arange(1, len(c))
        weights = np.full(len(k), 2.0)
        if n_dense % 2 == 0:
            weights[-1] = 1.0  # Nyquist term appears once
        self._k = k
        self._ck = weights * c[1:]
        self.length = TWO_PI * self._c0

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        phase = np.exp(1j * np.multiply.outer(t, self._k))
        return self._c0 * t + ((phase - 1.0) / (1j * self._k)) @ self._ck

    def interpolated_speed(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self._c0 + (np.exp(1j * np.multiply.outer(t, self._k)) @ self._ck).real

    def inverse(self, s, tol: float = 1e-14, max_iter: int = 50) -> np.ndarray:
        """Parameters ``t`` with ``S(t) = s`` by Newton's method."""
        s = np.asarray(s, dtype=float)
        t = s * (TWO_PI / self.length)
        for _ in range(max_iter):
            step = (self(t).real - s) / self.speed(t)
            t = t - step
            if np.max(np.abs(step), initial=0.0) <= tol:
                break
        return t


def euclid_speed(p: int, q: int) -> Callable[[np.ndarray], np.ndarray]:
    def speed(t):
        _, v, _ = curve_derivatives(p, q, t)
        return np.linalg.norm(v, axis=-1)

    return speed


def _metric_values(metric: MetricFn, pts: np.ndarray) -> np.ndarray:
    G = metric(pts[..., 0], pts[..., 1], pts[..., 2])
    return np.broadcast_to(np.stack([jets.values(row) for row in G], axis=-2), pts.shape[:-1] + (3, 3))


def metric_speed(p: int, q: int, metric: MetricFn) -> Callable[[np.ndarray], np.ndarray]:
    def speed(t):
        x, v, _ = curve_derivatives(p, q, t)
        g = _metric_values(metric, x)
        return np.sqrt(np.einsum("...i,...ij,...j->...", v, g, v))

    return speed


def _five_point_velocity(p: int, q: int, arc: ArcLength, s: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    def gamma(ss):
        return torus_knot_point(p, q, arc.inverse(ss)).array()

    return (-gamma(s + 2 * h) + 8 * gamma(s + h) - 8 * gamma(s - h) + gamma(s - 2 * h)) / (12 * h)


@dataclass
class CurveSampling:
    p: int
    q: int
    t: np.ndarray
    points: np.ndarray
    speeds: np.ndarray
    arc_length: np.ndarray  # cumulative, arc_length[-1] is the closed length
    curvature: np.ndarray
    closure_error: float
    min_nonadjacent_distance: float

    @property
    def length(self) -> float:
        return float(self.arc_length[-1])


def min_nonadjacent_distance(points: np.ndarray) -> float:
    """Smallest distance between samples that are not cyclic neighbours."""
    n = len(points)
    k = min(6, n)
    dist, idx = cKDTree(points).query(points, k=k)
    sep = np.abs(idx - np.arange(n)[:, None])
    sep = np.minimum(sep, n - sep)
    masked = np.where(sep > 1, dist, np.inf)
    return float(masked.min())


def knot_sampling(p: int, q: int, n_samples: int = 1024) -> CurveSampling:
    """Uniform-in-``t`` samples over one period with speed, arc length and curvature."""
    if n_samples < 64:
        raise ValueError("n_samples must be at least 64")
    t = np.arange(n_samples) * (TWO_PI / n_samples)
    x, v, a = curve_derivatives(p, q, t)
    speed = np.linalg.norm(v, axis=-1)
    kappa = np.linalg.norm(np.cross(v, a), axis=-1) / speed**3
    arc = ArcLength(euclid_speed(p, q))
    cumulative = np.append(arc(t).real, arc.length)
    closure = float(np.linalg.norm(torus_knot_point(p, q, 0.0).array() - torus_knot_point(p, q, TWO_PI).array()))
    return CurveSampling(p, q, t, x, speed, cumulative, kappa, closure, min_nonadjacent_distance(x))


def _simpson_closed(values_closed: np.ndarray, length: float) -> float:
    s = np.linspace(0.0, length, len(values_closed))
    return float(simpson(values_closed, x=s))


def _even(n: int) -> int:
    return n + (n % 2)


def euclid_total_curvature(p: int, q: int, n_samples: int = 1024) -> float:
    """``int kappa ds`` with ``kappa = |T' x T''| / |T'|^3``, Simpson on a uniform arc-length grid."""
    if n_samples < 256:
        raise ValueError("n_samples must be at least 256")
    n = _even(n_samples)
    arc = ArcLength(euclid_speed(p, q))
    s = np.linspace(0.0, arc.length, n + 1)
    t = arc.inverse(s)
    _, v, a = curve_derivatives(p, q, t)
    kappa = np.linalg.norm(np.cross(v, a), axis=-1) / np.linalg.norm(v, axis=-1) ** 3
    return _simpson_closed(kappa, arc.length)


@dataclass
class GeodesicCurvature:
    total: float
    length: float
    kappa: np.ndarray
    unit_speed_deviation: float


def geodesic_curvature(spec: KnotSpec, n_samples: int = 1024, metric: MetricFn | None = None) -> GeodesicCurvature:
    """Geodesic curvature of the knot with respect to ``g_{p,q,k}`` (or ``metric``).

    With unit-speed parameter ``s`` the covariant acceleration is
    ``D_s T' = (a - <a, v>_g v / |v|_g^2) / |v|_g^2`` where ``v = T'(t)`` and
    ``a^i = T''^i + Gamma^i_jk v^j v^k``.
    """
    if n_samples < 256:
        raise ValueError("n_samples must be at least 256")
    p, q = spec.p, spec.q
    constructed = metric is None
    metric = metric_fn(spec) if constructed else metric
    arc = ArcLength(metric_speed(p, q, metric))
    n = _even(n_samples)
    s = np.linspace(0.0, arc.length, n + 1)
    t = arc.inverse(s)
    x, v, acc = curve_derivatives(p, q, t)
    gamma = christoffel(x, spec) if constructed else christoffel(x, metric=metric)
    g = _metric_values(metric, x)
    a = acc + np.einsum("...ijk,...j,...k->...i", gamma, v, v)
    v2 = np.einsum("...i,...ij,...j->...", v, g, v)
    a_perp = a - (np.einsum("...i,...ij,...j->...", a, g, v) / v2)[..., None] * v
    kappa = np.sqrt(np.einsum("...i,...ij,...j->...", a_perp, g, a_perp)) / v2
    vel = _five_point_velocity(p, q, arc, s[:-1])
    unit = np.sqrt(np.einsum("...i,...ij,...j->...", vel, g[:-1], vel))
    return GeodesicCurvature(_simpson_closed(kappa, arc.length), arc.length, kappa, float(np.max(np.abs(unit - 1.0))))


def geodesic_total_curvature(spec: KnotSpec, n_samples: int = 1024, metric: MetricFn | None = None) -> float:
    return geodesic_curvature(spec, n_samples, metric).total


def euclid_unit_speed_deviation(p: int, q: int, n_samples: int = 1024) -> float:
    """``max | |d/ds T(t(s))| - 1 |`` over a uniform arc-length grid (five-point stencil)."""
    arc = ArcLength(euclid_speed(p, q))
    s = np.arange(n_samples) * (arc.length / n_samples)
    return float(np.max(np.abs(np.linalg.norm(_five_point_velocity(p, q, arc, s), axis=-1) - 1.0)))


@dataclass
class TamenessReport:
    spec: KnotSpec
    n_samples: int
    closure_error: float
    min_nonadjacent_distance: float
    euclid_unit_speed_deviation: float
    metric_unit_speed_deviation: float
    euclid_total: float
    euclid_total_refined: float
    geodesic_total: float
    geodesic_total_refined: float
    euclid_length: float
    metric_length: float
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def tameness_report(spec: KnotSpec, n_samples: int = 1024, tol_speed: float = 1e-8,
                    tol_convergence: float = 1e-3) -> TamenessReport:
    p, q = spec.p, spec.q
    samp = knot_sampling(p, q, n_samples)
    k1 = euclid_total_curvature(p, q, n_samples)
    k2 = euclid_total_curvature(p, q, 2 * n_samples)
    g1 = geodesic_curvature(spec, n_samples)
    g2 = geodesic_curvature(spec, 2 * n_samples)
    eu = euclid_unit_speed_deviation(p, q, n_samples)
    rep = TamenessReport(
        spec=spec,
        n_samples=n_samples,
        closure_error=samp.closure_error,
        min_nonadjacent_distance=samp.min_nonadjacent_distance,
        euclid_unit_speed_deviation=eu,
        metric_unit_speed_deviation=g1.unit_speed_deviation,
        euclid_total=k1,
        euclid_total_refined=k2,
        geodesic_total=g1.total,
        geodesic_total_refined=g2.total,
        euclid_length=samp.length,
        metric_length=g1.length,
    )
    rep.checks = {
        "closure": samp.closure_error <= 1e-12,
        "injective_at_resolution": samp.min_nonadjacent_distance > INJECTIVITY_TOL,
        "unit_speed": eu <= tol_speed and g1.unit_speed_deviation <= tol_speed,
        "finite_total_curvature": bool(np.isfinite([k1, k2, g1.total, g2.total]).all()),
        "self_convergent": abs(k1 - k2) <= tol_convergence and abs(g1.total - g2.total) <= tol_convergence,
        "fenchel": k1 >= TWO_PI - 1e-6,
    }
    return rep
