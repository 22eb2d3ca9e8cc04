"""Locating the zero set of ``X_{p,q,k}`` and checking it against the torus knot.

Zeros lie on a curve, so the field Jacobian is rank deficient there; the
refinement is therefore damped least squares on ``|X|^2`` rather than Newton
on ``X``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

from . import jets
from .fields import field_X, field_X_components
from .metric import metric_g
from .geometry import (
    DERIVATIVE_MARGIN,
    CartesianPoint,
    KnotSpec,
    torus_knot_point,
    tube_radius_in_range,
)
from .sampling import SCAN_MARGIN, grid_points

log = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
TWO_PI = 2.0 * math.pi
DEFAULT_REL_THRESHOLD = 0.15


# -- distance to the knot ---------------------------------------------------


def golden_section_min(f, a, b, tol: float = 1e-12):
    """Vectorised golden-section search on ``[a, b]`` (arrays of brackets).

    Returns the midpoint of the final bracket, whose width is at most ``tol``.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    width = float(np.max(b - a)) if a.size else 0.0
    if width <= tol:
        return 0.5 * (a + b)
    n = int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(n):
        left = fc < fd
        # keep [a, d] where f(c) < f(d), else [c, b]
        a, b = np.where(left, a, c), np.where(left, d, b)
        c_new = np.where(left, b - INV_PHI * (b - a), d)
        d_new = np.where(left, c, a + INV_PHI * (b - a))
        f_eval = f(np.where(left, c_new, d_new))
        fc, fd = np.where(left, f_eval, fd), np.where(left, fc, f_eval)
        c, d = c_new, d_new
    return 0.5 * (a + b)


@lru_cache(maxsize=16)
def _knot_tree(p: int, q: int, n: int):
    t = np.arange(n) * (TWO_PI / n)
    return t, cKDTree(torus_knot_point(p, q, t).array())


def _knot_distance_at(pts: np.ndarray, p: int, q: int, t: np.ndarray) -> np.ndarray:
    k = torus_knot_point(p, q, t).array()
    return np.linalg.norm(pts - k, axis=-1)


def dist_to_knot(pts, p: int, q: int, n_coarse: int = 4096, tol: float = 1e-12, return_param: bool = False):
    """Euclidean distance from point(s) to the (p, q) torus knot.

    Coarse pass over ``n_coarse`` uniform parameters (nearest three samples via
    a k-d tree), then golden-section refinement of each bracket
    ``[t_i - dt, t_i + dt]`` to width ``tol``.
    """
    arr = np.asarray(pts.array() if isinstance(pts, CartesianPoint) else pts, dtype=float)
    flat = arr.reshape(-1, 3)
    t_grid, tree = _knot_tree(p, q, n_coarse)
    dt = TWO_PI / n_coarse
    _, idx = tree.query(flat, k=3)
    best_d = np.full(len(flat), np.inf)
    best_t = np.zeros(len(flat))
    for j in range(idx.shape[1]):
        t0 = t_grid[idx[:, j]]
        t = golden_section_min(lambda s: _knot_distance_at(flat, p, q, s), t0 - dt, t0 + dt, tol)
        d = _knot_distance_at(flat, p, q, t)
        better = d < best_d
        best_d = np.where(better, d, best_d)
        best_t = np.where(better, t, best_t)
    best_d = best_d.reshape(arr.shape[:-1])
    best_t = np.remainder(best_t, TWO_PI).reshape(arr.shape[:-1])
    if return_param:
        return best_d, best_t
    return best_d if best_d.ndim else float(best_d)


# -- candidates and refinement ----------------------------------------------


@dataclass
class ZeroCandidate:
    point: tuple[float, float, float]
    residual: float
    refined: bool = False
    knot_distance: float = float("nan")
    converged: bool = False
    iterations: int = 0
    exited_domain: bool = False
    knot_param: float = float("nan")


def _field_and_jacobian(pts: np.ndarray, spec: KnotSpec, offset=None):
    xyz = jets.variables(pts[:, 0], pts[:, 1], pts[:, 2])
    comps = field_X_components(CartesianPoint(*xyz), spec)
    X = jets.values(comps)
    J = np.broadcast_to(jets.jacobian_matrix(comps), pts.shape[:-1] + (3, 3))
    if offset is not None:
        X = X + offset
    return X, J


def _field_only(pts: np.ndarray, spec: KnotSpec, offset=None) -> np.ndarray:
    X = jets.values(field_X_components(CartesianPoint(pts[:, 0], pts[:, 1], pts[:, 2]), spec))
    return X if offset is None else X + offset


def _in_domain(pts: np.ndarray) -> np.ndarray:
    R = np.hypot(np.hypot(pts[:, 0], pts[:, 1]) - 2.0, pts[:, 2])
    return tube_radius_in_range(R, DERIVATIVE_MARGIN)


@dataclass(frozen=True)
class LMSettings:
    damping: float = 1e-3
    shrink: float = 0.5
    grow: float = 2.0
    max_iter: int = 100
    tol_residual: float = 1e-12
    tol_step: float = 1e-14


def refine_zeros(starts, spec: KnotSpec, settings: LMSettings = LMSettings(), offset=None) -> list[ZeroCandidate]:
    """Levenberg-Marquardt on ``|X|^2`` from many starts at once.

    Steps that do not decrease ``|X|^2`` are rejected (damping grows), so the
    objective is monotone along accepted steps. A trial step leaving the
    annulus aborts that start and flags it. Converged means ``|X| <=
    tol_residual``; stagnation (step below ``tol_step``) stops without
    claiming convergence.
    """
    x = np.array(starts, dtype=float).reshape(-1, 3)
    n = len(x)
    if not np.all(_in_domain(x)):
        raise ValueError("every start must lie inside the annulus")
    lam = np.full(n, settings.damping)
    active = np.ones(n, dtype=bool)
    exited = np.zeros(n, dtype=bool)
    iters = np.zeros(n, dtype=int)
    X = _field_only(x, spec, offset)
    res = np.linalg.norm(X, axis=1)
    active &= res > settings.tol_residual
    for _ in range(settings.max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        Xa, J = _field_and_jacobian(x[idx], spec, offset)
        JT = np.swapaxes(J, -1, -2)
        A = JT @ J + lam[idx, None, None] * np.eye(3)
        step = -np.linalg.solve(A, (JT @ Xa[..., None]))[..., 0]
        trial = x[idx] + step
        iters[idx] += 1
        inside = _in_domain(trial)
        out = idx[~inside]
        exited[out] = True
        active[out] = False
        ok = idx[inside]
        if ok.size == 0:
            continue
        trial_ok = trial[inside]
        X_trial = _field_only(trial_ok, spec, offset)
        r_trial = np.linalg.norm(X_trial, axis=1)
        accept = r_trial <= res[ok]
        acc = ok[accept]
        x[acc] = trial_ok[accept]
        res[acc] = r_trial[accept]
        lam[acc] *= settings.shrink
        lam[ok[~accept]] *= settings.grow
        step_norm = np.linalg.norm(step[inside], axis=1)
        done = (res[ok] <= settings.tol_residual) | (step_norm <= settings.tol_step)
        active[ok[done]] = False
    converged = (res <= settings.tol_residual) & ~exited
    return [
        ZeroCandidate(
            point=tuple(float(v) for v in x[i]),
            residual=float(res[i]),
            refined=True,
            converged=bool(converged[i]),
            iterations=int(iters[i]),
            exited_domain=bool(exited[i]),
        )
        for i in range(n)
    ]


def refine_zero(start, spec: KnotSpec, settings: LMSettings = LMSettings(), offset=None) -> ZeroCandidate:
    """Refine a single start; the result carries its distance to the knot."""
    cand = refine_zeros(np.asarray(start, dtype=float)[None, :], spec, settings, offset)[0]
    d, t = dist_to_knot(np.array(cand.point), spec.p, spec.q, return_param=True)
    cand.knot_distance, cand.knot_param = float(d), float(t)
    return cand


@dataclass
class ScanResult:
    points: np.ndarray
    residuals: np.ndarray
    threshold: float
    spacing: np.ndarray
    n_grid: int

    def candidates(self) -> list[ZeroCandidate]:
        return [ZeroCandidate(tuple(float(v) for v in p), float(r)) for p, r in zip(self.points, self.residuals)]


def metric_norm(X: np.ndarray, pts: np.ndarray, spec: KnotSpec) -> np.ndarray:
    """``|X|_g`` under ``g_{p,q,k}``; equals the flat norm of the base field at the preimage."""
    g = metric_g(pts, spec).g
    return np.sqrt(np.einsum("...i,...ij,...j->...", X, g, X))


def scan(spec: KnotSpec, resolution: int = 64, threshold: float | None = None,
         rel_threshold: float = DEFAULT_REL_THRESHOLD, offset=None) -> ScanResult:
    """Grid nodes whose ``|X|_g`` is below ``threshold`` (default ``rel_threshold`` x median).

    The metric norm is used for selection because Euclidean ``|X|`` also
    shrinks wherever the pushforward frame is short, far from any zero.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    pts, spacing = grid_points(resolution, SCAN_MARGIN)
    X = _field_only(pts, spec, offset)
    size = metric_norm(X, pts, spec)
    if threshold is None:
        threshold = rel_threshold * float(np.median(size))
    keep = size < threshold
    return ScanResult(pts[keep], np.linalg.norm(X[keep], axis=1), float(threshold), spacing, len(pts))


def grid_scan(spec: KnotSpec, resolution: int = 64, threshold: float | None = None,
              rel_threshold: float = DEFAULT_REL_THRESHOLD, offset=None) -> list[ZeroCandidate]:
    """Unrefined candidates from :func:`scan`, with their distance to the knot filled in."""
    res = scan(spec, resolution, threshold, rel_threshold, offset)
    cands = res.candidates()
    if cands:
        d, t = dist_to_knot(res.points, spec.p, spec.q, return_param=True)
        for c, di, ti in zip(cands, d, t):
            c.knot_distance, c.knot_param = float(di), float(ti)
    return cands


# -- certification -----------------------------------------------------------


@dataclass(frozen=True)
class ZeroSetConfig:
    resolution: int = 64
    threshold: float | None = None
    rel_threshold: float = DEFAULT_REL_THRESHOLD
    n_knot_samples: int = 10_000
    tol_forward: float = 1e-10
    tol_reverse: float = 1e-6
    deltas: tuple[float, ...] = (0.05, 0.1, 0.2)
    max_gap: float = 4 * math.pi / 256
    offset: tuple[float, float, float] | None = None
    lm: LMSettings = LMSettings()
    max_listed: int = 20


@dataclass
class ZeroSetReport:
    spec: KnotSpec
    candidates: list[ZeroCandidate]
    forward_max_residual: float
    max_knot_distance: float
    min_offknot_field_norm: dict[float, float]
    coverage_max_gap: float
    threshold: float
    n_grid: int
    n_candidates: int
    n_converged: int
    n_exited: int
    max_iterations: int
    degenerate: bool
    passed: bool
    failures: list[str] = field(default_factory=list)
    offending_points: list[tuple[float, float, float]] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "spec": self.spec.label(),
            "passed": self.passed,
            "degenerate": self.degenerate,
            "forward_max_residual": self.forward_max_residual,
            "max_knot_distance": self.max_knot_distance,
            "min_offknot_field_norm": {f"{k:g}": v for k, v in self.min_offknot_field_norm.items()},
            "coverage_max_gap": self.coverage_max_gap,
            "threshold": self.threshold,
            "n_grid": self.n_grid,
            "n_candidates": self.n_candidates,
            "n_converged": self.n_converged,
            "n_exited": self.n_exited,
            "max_iterations": self.max_iterations,
            "failures": list(self.failures),
            "offending_points": [list(p) for p in self.offending_points],
        }


@lru_cache(maxsize=8)
def _grid_knot_distance(p: int, q: int, resolution: int) -> np.ndarray:
    pts, _ = grid_points(resolution, SCAN_MARGIN)
    return dist_to_knot(pts, p, q)


def max_param_gap(params: np.ndarray) -> float:
    """Largest gap between sorted parameters on the circle [0, 2 pi)."""
    if len(params) == 0:
        return TWO_PI
    ts = np.sort(np.remainder(params, TWO_PI))
    return float(np.max(np.diff(np.concatenate([ts, [ts[0] + TWO_PI]]))))


def certify_zero_set(spec: KnotSpec, config: ZeroSetConfig = ZeroSetConfig()) -> ZeroSetReport:
    """Two-sided check that the zero set of ``X_{p,q,k}`` is the (p, q) torus knot.

    forward: ``|X| <= tol_forward`` on uniformly sampled knot points;
    reverse: every converged refined zero lies within ``tol_reverse`` of the knot;
    floor:   ``min |X|`` over grid nodes at distance >= delta, reported per delta.
    """
    offset = None if config.offset is None else np.asarray(config.offset, dtype=float)
    failures: list[str] = []
    offending: list[tuple[float, float, float]] = []

    t = np.arange(config.n_knot_samples) * (TWO_PI / config.n_knot_samples)
    knot = torus_knot_point(spec.p, spec.q, t).array()
    fwd = np.linalg.norm(_field_only(knot, spec, offset), axis=1)
    bad = fwd > config.tol_forward
    if bad.any():
        failures.append(f"forward: {int(bad.sum())} knot samples with |X| > {config.tol_forward:g}")
        offending += [tuple(map(float, p)) for p in knot[bad][: config.max_listed]]

    res = scan(spec, config.resolution, config.threshold, config.rel_threshold, offset)
    cands: list[ZeroCandidate] = []
    if len(res.points):
        cands = refine_zeros(res.points, spec, config.lm, offset)
        pts = np.array([c.point for c in cands])
        d, tp = dist_to_knot(pts, spec.p, spec.q, return_param=True)
        for c, di, ti in zip(cands, d, tp):
            c.knot_distance, c.knot_param = float(di), float(ti)
    conv = [c for c in cands if c.converged]
    max_dist = max((c.knot_distance for c in conv), default=0.0)
    far = [c for c in conv if c.knot_distance > config.tol_reverse]
    if far:
        failures.append(f"reverse: {len(far)} refined zeros farther than {config.tol_reverse:g} from the knot")
        offending += [c.point for c in far[: config.max_listed]]

    grid, _ = grid_points(config.resolution, SCAN_MARGIN)
    dist = _grid_knot_distance(spec.p, spec.q, config.resolution)
    norms = np.linalg.norm(_field_only(grid, spec, offset), axis=1)
    floors = {}
    for delta in config.deltas:
        sel = dist >= delta
        floors[delta] = float(norms[sel].min()) if sel.any() else float("nan")
        if not floors[delta] > 0:
            failures.append(f"floor: m({delta:g}) = {floors[delta]:g} is not positive")

    gap = max_param_gap(np.array([c.knot_param for c in conv]))
    degenerate = len(conv) == 0
    if degenerate:
        failures.append("degenerate: no refined zeros located")
    elif gap > config.max_gap:
        failures.append(f"coverage: parameter gap {gap:.4g} exceeds {config.max_gap:.4g}")

    report = ZeroSetReport(
        spec=spec,
        candidates=cands,
        forward_max_residual=float(fwd.max()),
        max_knot_distance=float(max_dist),
        min_offknot_field_norm=floors,
        coverage_max_gap=gap,
        threshold=res.threshold,
        n_grid=res.n_grid,
        n_candidates=len(cands),
        n_converged=len(conv),
        n_exited=sum(c.exited_domain for c in cands),
        max_iterations=max((c.iterations for c in cands), default=0),
        degenerate=degenerate,
        passed=not failures,
        failures=failures,
        offending_points=offending,
    )
    log.info("zero set %s: passed=%s candidates=%d", spec.label(), report.passed, report.n_candidates)
    return report
