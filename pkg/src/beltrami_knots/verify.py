"""Check runners shared by the command line and the acceptance harness.

Each runner returns :class:`Check` records; a report is a plain dict with a
fixed key order so that JSON output is byte-stable for a fixed seed.
"""
from __future__ import annotations

import math
import platform
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy

from . import __version__
from .calculus import curl_g, det3, div_g, leading_minors
from .fields import base_field_B, field_fn, field_X, pushforward_oracle, trefoil_field_X
from .geometry import ToroidalPoint, KnotSpec, ext_gcd_coeffs, make_knot_spec
from .knotcheck import tameness_report
from .metric import matrix_M, metric_fn, metric_g, pullback_oracle
from .sampling import sample_in_domain
from .zeroset import ZeroSetConfig, ZeroSetReport, certify_zero_set

BELTRAMI_TOL = 1e-8
DIV_TOL = 1e-8
FLAT_TOL = 1e-12
PUSHFORWARD_TOL = 1e-10
PULLBACK_TOL = 1e-9
TREFOIL_TOL = 1e-12
WORKED_TOL = 1e-12
DISTINCT_GAP = 1e-6
WITNESS = (2.3, 0.7, 0.45)


@dataclass
class Check:
    name: str
    passed: bool
    max_residual: float
    tolerance: float
    n_samples: int

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "max_residual": float(self.max_residual),
            "tolerance": float(self.tolerance),
            "n_samples": int(self.n_samples),
        }


def _upper(name: str, res: float, tol: float, n: int) -> Check:
    return Check(name, bool(np.isfinite(res) and res <= tol), float(res), tol, n)


def spec_dict(spec: KnotSpec) -> dict:
    return {"p": spec.p, "q": spec.q, "k": spec.k, "b": spec.b, "d": spec.d}


def versions() -> dict:
    return {
        "beltrami_knots": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def beltrami_residuals(spec: KnotSpec, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Relative curl residual ``|curl_g X - X| / max(|X|, 1e-8)`` and ``|div_g X|`` at ``pts``."""
    X = field_X(pts, spec)
    c = curl_g(field_fn(spec), metric_fn(spec), pts)
    rel = np.linalg.norm(c - X, axis=-1) / np.maximum(np.linalg.norm(X, axis=-1), 1e-8)
    div = np.abs(div_g(field_fn(spec), metric_fn(spec), pts))
    return rel, div


def check_beltrami(spec: KnotSpec, pts: np.ndarray, tol_curl: float = BELTRAMI_TOL,
                   tol_div: float = DIV_TOL) -> list[Check]:
    rel, div = beltrami_residuals(spec, pts)
    return [_upper("beltrami", rel.max(), tol_curl, len(pts)), _upper("divergence", div.max(), tol_div, len(pts))]


def check_metric(spec: KnotSpec, pts: np.ndarray) -> list[Check]:
    """SPD via leading minors (residual = count of failing points) and the pullback oracle."""
    g = metric_g(pts, spec).g
    bad = int(np.sum(~np.all(leading_minors(g) > 0, axis=-1)))
    dev = np.abs(g - pullback_oracle(pts, spec)).max()
    return [Check("metric_spd", bad == 0, float(bad), 0.0, len(pts)),
            _upper("pullback", dev, PULLBACK_TOL, len(pts))]


def check_pushforward(spec: KnotSpec, pts: np.ndarray) -> Check:
    dev = np.abs(field_X(pts, spec) - pushforward_oracle(pts, spec)).max()
    return _upper("pushforward", dev, PUSHFORWARD_TOL, len(pts))


def check_trefoil(spec: KnotSpec, pts: np.ndarray) -> Check:
    dev = np.abs(field_X(pts, spec) - trefoil_field_X(pts, spec)).max()
    return _upper("trefoil", dev, TREFOIL_TOL, len(pts))


def flat_points(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 2 * math.pi, n)
    c = rng.uniform(0.0, 2 * math.pi, n)
    t = rng.uniform(0.5, 1.5, n)
    return np.stack([a, c, t], axis=-1)


def check_flat(n: int = 1000, seed: int = 0) -> list[Check]:
    """``curl B = B`` and ``div B = 0`` for the Euclidean metric on ``(a, c, t)``."""
    pts = flat_points(n, seed)

    def B(a, c, t):
        return base_field_B(ToroidalPoint(a, c, t))

    Bv = np.stack([np.asarray(v, dtype=float) for v in base_field_B(ToroidalPoint(*pts.T))], axis=-1)
    curl = np.abs(curl_g(B, None, pts) - Bv).max()
    div = np.abs(div_g(B, None, pts)).max()
    return [_upper("flat_curl", curl, FLAT_TOL, n), _upper("flat_divergence", div, FLAT_TOL, n)]


def check_worked_values() -> list[Check]:
    spec = make_knot_spec(2, 3, 0)
    g = metric_g((3.0, 0.0, 0.0), spec).g
    g_ref = np.array([[1.0, 0.0, 0.0], [0.0, 5.0 / 9.0, -7.0 / 3.0], [0.0, -7.0 / 3.0, 10.0]])
    det = float(det3([[g[i, j] for j in range(3)] for i in range(3)]))
    m_ok = np.array_equal(matrix_M(spec), np.array([[5, -7, 0], [-7, 10, 0], [0, 0, 1]]))
    return [
        _upper("worked_metric", np.abs(g - g_ref).max(), WORKED_TOL, 1),
        _upper("worked_det", abs(det - 1.0 / 9.0), WORKED_TOL, 1),
        Check("worked_M", m_ok, 0.0 if m_ok else 1.0, 0.0, 1),
        Check("worked_ext_gcd", ext_gcd_coeffs(2, 3) == (-1, 1), 0.0, 0.0, 1),
    ]


def family_gaps(specs: list[KnotSpec], witness=WITNESS) -> tuple[float, float]:
    """Smallest pairwise max-abs gap of ``g`` and of ``X`` at the witness point."""
    gs = {s: metric_g(witness, s).g for s in specs}
    xs = {s: field_X(witness, s) for s in specs}
    pairs = list(combinations(specs, 2))
    if not pairs:
        return math.inf, math.inf
    gmin = min(float(np.abs(gs[a] - gs[b]).max()) for a, b in pairs)
    xmin = min(float(np.abs(xs[a] - xs[b]).max()) for a, b in pairs)
    return gmin, xmin


def check_distinct(specs: list[KnotSpec]) -> list[Check]:
    """Residual is the smallest gap; the check passes when it exceeds the bound."""
    gmin, xmin = family_gaps(specs)
    n = len(specs) * (len(specs) - 1) // 2
    return [Check("distinct_metrics", gmin > DISTINCT_GAP, gmin, DISTINCT_GAP, n),
            Check("distinct_fields", xmin > DISTINCT_GAP, xmin, DISTINCT_GAP, n)]


def check_zero_set(spec: KnotSpec, config: ZeroSetConfig) -> tuple[list[Check], ZeroSetReport]:
    rep = certify_zero_set(spec, config)
    floor = min(rep.min_offknot_field_norm.values())
    n_conv = rep.n_converged
    checks = [
        _upper("zero_forward", rep.forward_max_residual, config.tol_forward, config.n_knot_samples),
        Check("zero_reverse", n_conv > 0 and rep.max_knot_distance <= config.tol_reverse,
              rep.max_knot_distance, config.tol_reverse, n_conv),
        Check("zero_floor", bool(floor > 0), floor, 0.0, rep.n_grid),
        Check("zero_coverage", not rep.degenerate and rep.coverage_max_gap <= config.max_gap,
              rep.coverage_max_gap, config.max_gap, n_conv),
    ]
    return checks, rep


def check_tameness(spec: KnotSpec, n_samples: int = 1024) -> tuple[list[Check], dict]:
    rep = tameness_report(spec, n_samples)
    n = n_samples
    checks = [
        _upper("tame_closure", rep.closure_error, 1e-12, n),
        Check("tame_injective", rep.checks["injective_at_resolution"], rep.min_nonadjacent_distance, 1e-6, n),
        _upper("tame_unit_speed", max(rep.euclid_unit_speed_deviation, rep.metric_unit_speed_deviation), 1e-8, n),
        _upper("tame_self_convergence", abs(rep.euclid_total - rep.euclid_total_refined), 1e-3, n),
        _upper("tame_geodesic_self_convergence", abs(rep.geodesic_total - rep.geodesic_total_refined), 1e-3, n),
        Check("tame_fenchel", rep.checks["fenchel"], rep.euclid_total, 2 * math.pi - 1e-6, n),
    ]
    info = {
        "euclid_total_curvature": rep.euclid_total,
        "geodesic_total_curvature": rep.geodesic_total,
        "geodesic_self_convergence": abs(rep.geodesic_total - rep.geodesic_total_refined),
        "euclid_length": float(rep.euclid_length),
        "metric_length": float(rep.metric_length),
    }
    return checks, info


@dataclass
class VerifySettings:
    n_points: int = 1000
    seed: int = 0
    tol_curl: float = BELTRAMI_TOL
    tol_div: float = DIV_TOL
    n_curve: int = 1024
    zero: ZeroSetConfig = ZeroSetConfig()


def verify_spec(spec: KnotSpec, settings: VerifySettings = VerifySettings()) -> dict:
    """Every per-spec check; returns ``{spec, checks, zero_set, tameness}``."""
    pts = sample_in_domain(settings.n_points, settings.seed)
    checks = check_beltrami(spec, pts, settings.tol_curl, settings.tol_div)
    checks += check_metric(spec, pts)
    checks.append(check_pushforward(spec, pts))
    if (spec.p, spec.q) == (2, 3):
        checks.append(check_trefoil(spec, pts))
    zchecks, zrep = check_zero_set(spec, settings.zero)
    tchecks, tinfo = check_tameness(spec, settings.n_curve)
    checks += zchecks + tchecks
    return {
        "spec": spec_dict(spec),
        "checks": [c.to_dict() for c in checks],
        "zero_set": zrep.summary(),
        "tameness": tinfo,
    }


def verify_family(specs: list[KnotSpec], settings: VerifySettings = VerifySettings()) -> dict:
    """Per-spec sections plus the global checks (flat model, worked values, distinctness)."""
    sections = [verify_spec(s, settings) for s in specs]
    checks = check_flat(settings.n_points, settings.seed) + check_worked_values()
    families: dict[tuple[int, int], list[KnotSpec]] = {}
    for s in specs:
        families.setdefault((s.p, s.q), []).append(s)
    # distinctness is a statement about the k-family of one (p, q); across
    # different (p, q) a metric can repeat, e.g. g_{1,1,-2} = g_{3,2,0}
    fam_checks = [check_distinct(group) for group in families.values() if len(group) > 1]
    for i, name in enumerate(("distinct_metrics", "distinct_fields")):
        if fam_checks:
            worst = min((fc[i] for fc in fam_checks), key=lambda c: c.max_residual)
            checks.append(Check(name, all(fc[i].passed for fc in fam_checks), worst.max_residual,
                                DISTINCT_GAP, sum(fc[i].n_samples for fc in fam_checks)))
    for sec in sections:
        worst = [c for c in sec["checks"] if not c["pass"]]
        label = "spec_p{p}_q{q}_k{k}".format(**sec["spec"])
        checks.append(Check(label, not worst, float(len(worst)), 0.0, len(sec["checks"])))
    report = {
        "spec": [sec["spec"] for sec in sections],
        "checks": [c if isinstance(c, dict) else c.to_dict() for c in checks],
        "sections": sections,
        "versions": versions(),
        "seed": settings.seed,
    }
    return report


def report_passed(report: dict) -> bool:
    return all(c["pass"] for c in report["checks"]) and all(
        c["pass"] for sec in report.get("sections", []) for c in sec["checks"]
    )
