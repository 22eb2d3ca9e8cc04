"""CSV, JSON and legacy-VTK writers (and readers for round-trip checks).

Floats are written with 17 significant digits so re-reading reproduces them
exactly. All text files are UTF-8 with LF line endings.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fields import field_X
from .geometry import CORE_RADIUS, INNER_RADIUS, OUTER_RADIUS, KnotSpec, torus_knot_point
from .sampling import sample_in_domain

FLOAT_FMT = "%.17g"
KNOT_HEADER = ("t", "x", "y", "z")
CANDIDATE_HEADER = ("x", "y", "z", "residual", "knot_distance", "refined")
GLYPH_HEADER = ("x", "y", "z", "Xx", "Xy", "Xz")
FIELDLINE_HEADER = ("line", "x", "y", "z")


class ExportError(OSError):
    pass


def _write_text(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ExportError(f"cannot write {path}: {exc}") from exc
    return path


def format_rows(rows: np.ndarray) -> str:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.size == 0:
        return ""
    return "".join(",".join(FLOAT_FMT % v for v in row) + "\n" for row in rows)


def write_csv(path, header, rows) -> Path:
    return _write_text(path, ",".join(header) + "\n" + format_rows(rows))


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    header = lines[0].split(",")
    body = [ln for ln in lines[1:] if ln]
    data = np.array([[float(v) for v in ln.split(",")] for ln in body]).reshape(len(body), len(header))
    return header, data


def knot_rows(p: int, q: int, n_samples: int) -> np.ndarray:
    t = np.arange(n_samples) * (2 * math.pi / n_samples)
    return np.column_stack([t, torus_knot_point(p, q, t).array()])


def candidate_rows(candidates) -> np.ndarray:
    if not candidates:
        return np.empty((0, 6))
    return np.array([[*c.point, c.residual, c.knot_distance, float(c.refined)] for c in candidates])


def glyph_rows(spec: KnotSpec, n: int, seed: int) -> np.ndarray:
    pts = sample_in_domain(n, seed)
    return np.column_stack([pts, field_X(pts, spec)])


def fieldline_rows(lines) -> np.ndarray:
    blocks = [np.column_stack([np.full(len(fl.points), i), fl.points]) for i, fl in enumerate(lines) if len(fl.points)]
    return np.concatenate(blocks) if blocks else np.empty((0, 4))


def annulus_boundary(n_a: int = 64, n_c: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Quad meshes of the inner and outer boundary tori.

    Returns ``(points, quads)`` with quads indexing into points.
    """
    a = np.arange(n_a) * (2 * math.pi / n_a)
    c = np.arange(n_c) * (2 * math.pi / n_c)
    A, C = np.meshgrid(a, c, indexing="ij")
    pts, quads = [], []
    for k, R in enumerate((INNER_RADIUS, OUTER_RADIUS)):
        rho = CORE_RADIUS + R * np.cos(C)
        pts.append(np.stack([rho * np.cos(A), rho * np.sin(A), R * np.sin(C)], axis=-1).reshape(-1, 3))
        i, j = np.meshgrid(np.arange(n_a), np.arange(n_c), indexing="ij")
        base = k * n_a * n_c

        def idx(ii, jj):
            return base + (ii % n_a) * n_c + (jj % n_c)

        quads.append(np.stack([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)], axis=-1).reshape(-1, 4))
    return np.concatenate(pts), np.concatenate(quads)


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def write_json(path, obj) -> Path:
    return _write_text(path, dumps_json(obj))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


@dataclass
class PolyData:
    points: np.ndarray
    lines: list[list[int]]
    polygons: list[list[int]]
    title: str = ""
    vectors: np.ndarray | None = None


def _cells(keyword: str, cells) -> str:
    if not cells:
        return ""
    size = sum(len(c) + 1 for c in cells)
    body = "".join(f"{len(c)} " + " ".join(str(int(i)) for i in c) + "\n" for c in cells)
    return f"{keyword} {len(cells)} {size}\n" + body


def write_vtk(path, points, lines=(), polygons=(), vectors=None, title: str = "beltrami_knots") -> Path:
    """Legacy VTK 3.0 ASCII POLYDATA; ``vectors`` become point data named ``X``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    point_data = ""
    if vectors is not None:
        point_data = f"POINT_DATA {len(pts)}\nVECTORS X double\n" + format_rows(vectors).replace(",", " ")
    text = (
        "# vtk DataFile Version 3.0\n"
        f"{title}\n"
        "ASCII\n"
        "DATASET POLYDATA\n"
        f"POINTS {len(pts)} double\n"
        + format_rows(pts).replace(",", " ")
        + _cells("LINES", list(lines))
        + _cells("POLYGONS", list(polygons))
        + point_data
    )
    return _write_text(path, text)


def read_vtk(path) -> PolyData:
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().split("\n")
    if not tokens[0].startswith("# vtk DataFile Version 3.0"):
        raise ValueError(f"{path}: not a legacy VTK 3.0 file")
    title = tokens[1]
    if tokens[2].strip() != "ASCII" or tokens[3].strip() != "DATASET POLYDATA":
        raise ValueError(f"{path}: expected ASCII POLYDATA")
    words = " ".join(tokens[4:]).split()
    pos = 0
    points = np.empty((0, 3))
    cells: dict[str, list[list[int]]] = {"LINES": [], "POLYGONS": []}
    vectors = None
    while pos < len(words):
        key = words[pos]
        if key == "POINTS":
            n = int(words[pos + 1])
            vals = np.array(words[pos + 3: pos + 3 + 3 * n], dtype=float)
            points = vals.reshape(n, 3)
            pos += 3 + 3 * n
        elif key in cells:
            n = int(words[pos + 1])
            pos += 3
            for _ in range(n):
                m = int(words[pos])
                cells[key].append([int(w) for w in words[pos + 1: pos + 1 + m]])
                pos += 1 + m
        elif key == "POINT_DATA" and words[pos + 2] == "VECTORS":
            n = int(words[pos + 1])
            vectors = np.array(words[pos + 5: pos + 5 + 3 * n], dtype=float).reshape(n, 3)
            pos += 5 + 3 * n
        else:
            raise ValueError(f"{path}: unexpected section {key!r}")
    return PolyData(points, cells["LINES"], cells["POLYGONS"], title, vectors)


def closed_polyline(n: int) -> list[int]:
    return list(range(n)) + [0]
