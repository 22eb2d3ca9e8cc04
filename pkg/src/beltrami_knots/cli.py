"""Command-line entry point: ``beltrami-knots <command> [options]``.

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 invalid input.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .export import (
    CANDIDATE_HEADER,
    FIELDLINE_HEADER,
    GLYPH_HEADER,
    KNOT_HEADER,
    ExportError,
    annulus_boundary,
    candidate_rows,
    closed_polyline,
    dumps_json,
    fieldline_rows,
    glyph_rows,
    knot_rows,
    write_csv,
    write_json,
    write_vtk,
)
from .fieldlines import DEFAULT_STEP, integrate_field_line
from .fields import field_X
from .geometry import DomainError, KnotSpec, make_knot_spec
from .knotcheck import tameness_report
from .metric import metric_g
from .sampling import sample_in_domain
from .verify import (
    VerifySettings,
    beltrami_residuals,
    check_zero_set,
    report_passed,
    spec_dict,
    verify_family,
    versions,
)
from .zeroset import ZeroSetConfig

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2
FORMATS = ("csv", "json", "vtk")


class ConfigError(ValueError):
    pass


def parse_int_range(text: str) -> tuple[int, ...]:
    """``"0"``, ``"-2..2"`` or ``"-1,0,3"`` to a tuple of ints."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(s) for s in text.split(".."))
            if hi < lo:
                raise ConfigError(f"empty range {text!r}")
            return tuple(range(lo, hi + 1))
        return tuple(int(s) for s in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"cannot parse integer range {text!r}") from exc


def parse_point(text: str) -> np.ndarray:
    try:
        vals = [float(s) for s in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse point {text!r}") from exc
    if len(vals) != 3:
        raise ConfigError(f"point needs three coordinates, got {text!r}")
    return np.array(vals)


@dataclass
class RunConfig:
    p: tuple[int, ...] = (2,)
    q: tuple[int, ...] = (3,)
    k: tuple[int, ...] = (0,)
    resolution: int = 64
    seed: int = 0
    out: Path | None = None
    fmt: str = "csv"
    tol_curl: float = 1e-8
    tol_div: float = 1e-8
    tol_zero: float = 1e-10
    n_points: int = 1000
    n_samples: int = 1024
    threshold: float | None = None
    step: float = DEFAULT_STEP
    span: float = 1.0
    n_lines: int = 8
    starts: list = field(default_factory=list)
    point: np.ndarray | None = None

    def __post_init__(self):
        for name in ("tol_curl", "tol_div", "tol_zero", "step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.resolution < 8:
            raise ConfigError("resolution must be at least 8")
        if self.fmt not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.n_points < 1 or self.n_samples < 256:
            raise ConfigError("need n_points >= 1 and n_samples >= 256")
        if self.threshold is not None and self.threshold < 0:
            raise ConfigError("threshold must be non-negative")

    def specs(self) -> list[KnotSpec]:
        try:
            return [make_knot_spec(p, q, k) for p in self.p for q in self.q for k in self.k]
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def zero_config(self) -> ZeroSetConfig:
        return ZeroSetConfig(resolution=self.resolution, threshold=self.threshold, tol_forward=self.tol_zero)

    def verify_settings(self) -> VerifySettings:
        return VerifySettings(n_points=self.n_points, seed=self.seed, tol_curl=self.tol_curl,
                              tol_div=self.tol_div, n_curve=self.n_samples, zero=self.zero_config())


def _out_dir(cfg: RunConfig) -> Path:
    return Path(cfg.out) if cfg.out is not None else Path(".")


def _print_checks(checks: Sequence[dict], prefix: str = "") -> None:
    for c in checks:
        status = "PASS" if c["pass"] else "FAIL"
        print(f"{status} {prefix}{c['name']}: {c['max_residual']:.3e} (tol {c['tolerance']:.1e}, n={c['n_samples']})")


def cmd_verify(cfg: RunConfig) -> int:
    report = verify_family(cfg.specs(), cfg.verify_settings())
    for sec in report["sections"]:
        _print_checks(sec["checks"], "p{p} q{q} k{k} ".format(**sec["spec"]))
    _print_checks(report["checks"])
    if cfg.out is not None:
        path = write_json(_out_dir(cfg) / "verify_report.json", report)
        print(f"report: {path}")
    ok = report_passed(report)
    print("verify:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_zeroset(cfg: RunConfig) -> int:
    ok = True
    for spec in cfg.specs():
        checks, rep = check_zero_set(spec, cfg.zero_config())
        summary = rep.summary()
        _print_checks([c.to_dict() for c in checks], spec.label() + " ")
        passed = all(c.passed for c in checks)
        ok &= passed
        if cfg.out is not None:
            base = _out_dir(cfg) / f"zeroset_{_tag(spec)}"
            write_csv(base.with_suffix(".csv"), CANDIDATE_HEADER, candidate_rows(rep.candidates))
            write_json(base.with_suffix(".json"), {
                "spec": spec_dict(spec),
                "checks": [c.to_dict() for c in checks],
                "zero_set": summary,
                "versions": versions(),
                "seed": cfg.seed,
            })
        if summary["degenerate"]:
            print(f"{spec.label()}: degenerate (no refined zeros)")
    return EXIT_OK if ok else EXIT_FAIL


def _tag(spec: KnotSpec) -> str:
    return f"p{spec.p}_q{spec.q}_k{spec.k}"


def cmd_fieldlines(cfg: RunConfig) -> int:
    starts = list(cfg.starts) or list(sample_in_domain(cfg.n_lines, cfg.seed, margin=0.05))
    for spec in cfg.specs():
        lines = [integrate_field_line(spec, s, cfg.step, cfg.span) for s in starts]
        warnings = [
            {"line": i, "start": [float(v) for v in fl.start], "warning": w}
            for i, fl in enumerate(lines) for w in fl.warnings
        ]
        for w in warnings:
            print(f"warning: line {w['line']}: {w['warning']}", file=sys.stderr)
        for i, fl in enumerate(lines):
            print(f"{spec.label()} line {i}: {fl.n_points} points, stop={fl.stop_reason}")
        if cfg.out is None:
            continue
        base = _out_dir(cfg) / f"fieldlines_{_tag(spec)}"
        if cfg.fmt == "csv":
            write_csv(base.with_suffix(".csv"), FIELDLINE_HEADER, fieldline_rows(lines))
        elif cfg.fmt == "vtk":
            pts, cells, offset = [], [], 0
            for fl in lines:
                if len(fl.points):
                    pts.append(fl.points)
                    cells.append(list(range(offset, offset + len(fl.points))))
                    offset += len(fl.points)
            write_vtk(base.with_suffix(".vtk"), np.concatenate(pts) if pts else np.empty((0, 3)), cells)
        if cfg.fmt == "json" or warnings:
            write_json(base.with_suffix(".json"), {
                "spec": spec_dict(spec),
                "step": cfg.step,
                "span": cfg.span,
                "lines": [{"start": fl.start.tolist(), "stop": fl.stop_reason, "points": fl.points.tolist()}
                          for fl in lines] if cfg.fmt == "json" else [],
                "warnings": warnings,
                "seed": cfg.seed,
            })
    return EXIT_OK


def cmd_knot(cfg: RunConfig) -> int:
    ok = True
    for spec in cfg.specs():
        rep = tameness_report(spec, cfg.n_samples)
        ok &= rep.passed
        for name, passed in rep.checks.items():
            print(f"{'PASS' if passed else 'FAIL'} {spec.label()} {name}")
        print(f"{spec.label()}: length {rep.euclid_length:.12g}, total curvature {rep.euclid_total:.12g}, "
              f"geodesic total curvature {rep.geodesic_total:.3e}")
        if cfg.out is not None:
            _write_knot(spec, cfg, _out_dir(cfg) / f"knot_p{spec.p}_q{spec.q}")
    return EXIT_OK if ok else EXIT_FAIL


def _write_knot(spec: KnotSpec, cfg: RunConfig, base: Path) -> Path:
    rows = knot_rows(spec.p, spec.q, cfg.n_samples)
    if cfg.fmt == "csv":
        return write_csv(base.with_suffix(".csv"), KNOT_HEADER, rows)
    if cfg.fmt == "vtk":
        return write_vtk(base.with_suffix(".vtk"), rows[:, 1:], [closed_polyline(len(rows))])
    return write_json(base.with_suffix(".json"), {"p": spec.p, "q": spec.q, "t": rows[:, 0].tolist(),
                                                  "points": rows[:, 1:].tolist()})


def cmd_export(cfg: RunConfig) -> int:
    out = _out_dir(cfg)
    bpts, quads = annulus_boundary()
    written = []
    for spec in cfg.specs():
        written.append(_write_knot(spec, cfg, out / f"knot_p{spec.p}_q{spec.q}"))
        glyphs = glyph_rows(spec, cfg.n_points, cfg.seed)
        base = out / f"glyphs_{_tag(spec)}"
        if cfg.fmt == "csv":
            written.append(write_csv(base.with_suffix(".csv"), GLYPH_HEADER, glyphs))
        elif cfg.fmt == "vtk":
            written.append(write_vtk(base.with_suffix(".vtk"), glyphs[:, :3], vectors=glyphs[:, 3:]))
        else:
            written.append(write_json(base.with_suffix(".json"), {"points": glyphs[:, :3].tolist(),
                                                                  "X": glyphs[:, 3:].tolist()}))
    if cfg.fmt == "csv":
        written.append(write_csv(out / "boundary.csv", ("x", "y", "z"), bpts))
    elif cfg.fmt == "vtk":
        written.append(write_vtk(out / "boundary.vtk", bpts, polygons=quads.tolist()))
    else:
        written.append(write_json(out / "boundary.json", {"points": bpts.tolist(), "quads": quads.tolist()}))
    for path in written:
        print(path)
    return EXIT_OK


def cmd_eval(cfg: RunConfig) -> int:
    if cfg.point is None:
        raise ConfigError("eval needs --point x,y,z")
    results = []
    for spec in cfg.specs():
        try:
            X = field_X(cfg.point, spec)
            mv = metric_g(cfg.point, spec)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        rel, div = beltrami_residuals(spec, cfg.point[None, :])
        results.append({
            "spec": spec_dict(spec),
            "point": cfg.point.tolist(),
            "X": X.tolist(),
            "norm_X": float(np.linalg.norm(X)),
            "g": mv.g.tolist(),
            "det_g": float(mv.det),
            "curl_residual": float(rel[0]),
            "div": float(div[0]),
        })
    sys.stdout.write(dumps_json(results[0] if len(results) == 1 else results))
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "zeroset": cmd_zeroset,
    "fieldlines": cmd_fieldlines,
    "knot": cmd_knot,
    "export": cmd_export,
    "eval": cmd_eval,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beltrami-knots", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--p", default="2", help="int, list a,b or range lo..hi")
        sp.add_argument("--q", default="3")
        sp.add_argument("--k", default="0")
        sp.add_argument("--resolution", type=int, default=64)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", type=Path, default=None)
        sp.add_argument("--format", dest="fmt", choices=FORMATS, default="csv")
        sp.add_argument("--tol-curl", type=float, default=1e-8)
        sp.add_argument("--tol-zero", type=float, default=1e-10)
        sp.add_argument("--n-points", type=int, default=1000)
        sp.add_argument("--n-samples", type=int, default=1024)
        if name == "zeroset":
            sp.add_argument("--threshold", type=float, default=None,
                            help="absolute |X|_g scan threshold (0 gives an empty scan)")
        if name == "fieldlines":
            sp.add_argument("--step", type=float, default=DEFAULT_STEP)
            sp.add_argument("--span", type=float, default=1.0)
            sp.add_argument("--n-lines", type=int, default=8)
            sp.add_argument("--start", action="append", default=[], help="x,y,z (repeatable)")
        if name == "eval":
            sp.add_argument("--point", required=True)
    return parser


def _join_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-2..2" as an option; glue such values to their flag
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in ("--p", "--q", "--k", "--point", "--start") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        p=parse_int_range(ns.p),
        q=parse_int_range(ns.q),
        k=parse_int_range(ns.k),
        resolution=ns.resolution,
        seed=ns.seed,
        out=ns.out,
        fmt=ns.fmt,
        tol_curl=ns.tol_curl,
        tol_zero=ns.tol_zero,
        n_points=ns.n_points,
        n_samples=ns.n_samples,
        threshold=getattr(ns, "threshold", None),
        step=getattr(ns, "step", DEFAULT_STEP),
        span=getattr(ns, "span", 1.0),
        n_lines=getattr(ns, "n_lines", 8),
        starts=[parse_point(s) for s in getattr(ns, "start", [])],
        point=parse_point(ns.point) if getattr(ns, "point", None) else None,
    )


def main(argv: Sequence[str] | None = None) -> int:
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(ns)
        cfg.specs()
        return COMMANDS[ns.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
