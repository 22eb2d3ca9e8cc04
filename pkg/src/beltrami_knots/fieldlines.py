"""Fixed-step RK4 integration of ``X_{p,q,k}`` inside the annulus."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import field_X_components
from .geometry import CartesianPoint, KnotSpec, annulus_value, tube_radius_in_range

DEFAULT_STEP = 1e-3
BOUNDARY_MARGIN = 1e-3
STATIONARY_TOL = 1e-12


def _rhs(x: np.ndarray, spec: KnotSpec) -> np.ndarray:
    comps = field_X_components(CartesianPoint(x[0], x[1], x[2]), spec)
    return np.array([float(c) for c in comps])


def _inside(x: np.ndarray, margin: float) -> bool:
    return bool(tube_radius_in_range(np.sqrt(annulus_value(x)), margin))


@dataclass
class FieldLine:
    start: np.ndarray
    step: float
    span: float
    points: np.ndarray
    stop_reason: str
    warnings: list[str] = field(default_factory=list)

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def endpoint(self) -> np.ndarray:
        return self.points[-1]


def rk4_step(x: np.ndarray, h: float, spec: KnotSpec) -> np.ndarray:
    k1 = _rhs(x, spec)
    k2 = _rhs(x + 0.5 * h * k1, spec)
    k3 = _rhs(x + 0.5 * h * k2, spec)
    k4 = _rhs(x + h * k3, spec)
    return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_field_line(spec: KnotSpec, start, step: float = DEFAULT_STEP, span: float = 1.0,
                         margin: float = BOUNDARY_MARGIN) -> FieldLine:
    """Integrate ``dx/ds = X(x)`` for parameter length ``span``.

    Stops early when the next point would leave the shrunk annulus
    ``0.5 + margin < R < 1.5 - margin``. A start outside it gives an empty
    polyline, a start on a zero a single stationary point; both carry a
    warning.
    """
    if step <= 0 or span < 0:
        raise ValueError("step must be positive and span non-negative")
    x = np.asarray(start, dtype=float).reshape(3)
    if not _inside(x, margin):
        return FieldLine(x, step, span, np.empty((0, 3)), "outside", ["start is outside the domain margin"])
    if np.linalg.norm(_rhs(x, spec)) <= STATIONARY_TOL:
        return FieldLine(x, step, span, x[None, :].copy(), "stationary", ["start is a zero of the field"])
    n_steps = int(round(span / step))
    pts = [x]
    reason = "span"
    for _ in range(n_steps):
        nxt = rk4_step(pts[-1], step, spec)
        if not _inside(nxt, margin):
            reason = "boundary"
            break
        pts.append(nxt)
    return FieldLine(x, step, span, np.array(pts), reason)


@dataclass
class OrderCheck:
    steps: tuple[float, ...]
    differences: tuple[float, float]
    ratio: float
    passed: bool


ROUNDOFF_FLOOR = 1e-11


def rk4_order_check(spec: KnotSpec, start, span: float = 1.0, steps=(2e-3, 1e-3, 5e-4)) -> OrderCheck:
    """Endpoint differences under step halving; fourth order gives a ratio near 16.

    Differences already at the round-off floor carry no order information and
    count as a pass. Lines that hit the boundary are excluded by requiring
    every run to reach the full span.
    """
    lines = [integrate_field_line(spec, start, h, span) for h in steps]
    ends = [fl.endpoint for fl in lines]
    d = (float(np.linalg.norm(ends[0] - ends[1])), float(np.linalg.norm(ends[1] - ends[2])))
    ratio = d[0] / d[1] if d[1] > 0 else float("inf")
    full = all(fl.stop_reason == "span" for fl in lines)
    ok = full and (12.0 <= ratio <= 20.0 or max(d) <= ROUNDOFF_FLOOR)
    return OrderCheck(tuple(steps), d, ratio, ok)
