"""Seeded point sets inside the annulus."""
from __future__ import annotations

import numpy as np

from .geometry import CORE_RADIUS, INNER_RADIUS, OUTER_RADIUS

SCAN_MARGIN = 1e-3
BOX_LO = np.array([-(CORE_RADIUS + OUTER_RADIUS), -(CORE_RADIUS + OUTER_RADIUS), -OUTER_RADIUS])
BOX_HI = -BOX_LO


def sample_in_domain(n: int, seed: int, margin: float = SCAN_MARGIN) -> np.ndarray:
    """``n`` uniform points with tube radius in (0.5 + margin, 1.5 - margin), by rejection."""
    rng = np.random.default_rng(seed)
    out = np.empty((0, 3))
    while len(out) < n:
        cand = rng.uniform(BOX_LO, BOX_HI, size=(2 * (n - len(out)) + 16, 3))
        R = np.hypot(np.hypot(cand[:, 0], cand[:, 1]) - CORE_RADIUS, cand[:, 2])
        keep = (R > INNER_RADIUS + margin) & (R < OUTER_RADIUS - margin)
        out = np.concatenate([out, cand[keep]])
    return out[:n]


def grid_points(resolution: int, margin: float = SCAN_MARGIN) -> tuple[np.ndarray, np.ndarray]:
    """In-domain nodes of a ``resolution^3`` grid over the annulus bounding box.

    Returns ``(points, spacing)``; points are in C order of the full grid.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    axes = [np.linspace(lo, hi, resolution) for lo, hi in zip(BOX_LO, BOX_HI)]
    spacing = np.array([ax[1] - ax[0] for ax in axes])
    X, Y, Z = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=-1)
    R = np.hypot(np.hypot(pts[:, 0], pts[:, 1]) - CORE_RADIUS, pts[:, 2])
    keep = (R > INNER_RADIUS + margin) & (R < OUTER_RADIUS - margin)
    return pts[keep], spacing
