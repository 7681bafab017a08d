"""Command-line front end: ``awlift <command> --map <file|json> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .errors import AwliftError, InvariantViolation
from .extension import ExtensionMap, beltrami_classical, classical_aw, exterior_samples, extend_eval, qc_json, qc_report
from .grid import GridParams
from .harmonic import condition_report, convexity_profile
from .mapspec import load_spec
from .mesh import attributes_csv, extension_mesh, surface_mesh, to_obj, to_ply
from .reflection import critical_point_find

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEHARI_ONLY = 2
EXIT_FAILED = 3

CONVEXITY_TOL = -1e-7
CLASSICAL_TOL = 1e-7


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; exit 2 is reserved for the Nehari-only verdict
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _num(x) -> str:
    return format(float(x), ".17g")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _summary(args, obj) -> None:
    """JSON summary to --report, or to stdout when no report path is given."""
    _write(args.report, _dump(obj))


def _grid(args) -> GridParams:
    return GridParams(args.n_radial, args.n_angular, args.r_max, args.exterior_r_max)


def _sidecar(path: str) -> str:
    p = Path(path)
    return str(p.with_name(p.stem + ".attributes.csv"))


# --- commands ------------------------------------------------------------------------


def cmd_check(args) -> int:
    spec = load_spec(args.map)
    report = condition_report(spec, _grid(args))
    if args.out:
        _write(args.out, report.to_csv())
    _summary(args, report.summary())
    if report.aw_ok:
        return EXIT_OK
    return EXIT_NEHARI_ONLY if report.nehari_ok else EXIT_FAILED


def _emit_mesh(args, mesh, title: str) -> int:
    out = args.out or ("surface" if title == "surface" else "extension") + "." + args.format
    header = f"awlift {title}\n{json.dumps(mesh.summary(), sort_keys=True)}"
    text = to_obj(mesh, header) if args.format == "obj" else to_ply(mesh, header)
    _write(out, text)
    if out != "-":
        _write(_sidecar(out), attributes_csv(mesh))
    if args.report or out != "-":
        _summary(args, mesh.summary())
    return EXIT_OK


def cmd_mesh(args) -> int:
    spec = load_spec(args.map)
    return _emit_mesh(args, surface_mesh(spec, _grid(args)), "surface")


def cmd_extend(args) -> int:
    spec = load_spec(args.map)
    return _emit_mesh(args, extension_mesh(spec, _grid(args)), "extension")


def cmd_qc(args) -> int:
    spec = load_spec(args.map)
    report = qc_report(ExtensionMap(spec, _grid(args)), args.samples or 500, args.seed)
    text = qc_json(report) + "\n"
    _write(args.report or args.out, text)
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_convexity(args) -> int:
    spec = load_spec(args.map)
    rng = np.random.default_rng(args.seed)
    count = args.samples or 20
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["geodesic", "theta1", "theta2", "k", "second_difference"])
    worst = np.inf
    for g in range(count):
        t1, t2 = rng.uniform(0, 2 * np.pi, 2)
        prof = convexity_profile(spec, (t1, t2))
        worst = min(worst, float(prof.min()))
        for k, v in enumerate(prof):
            w.writerow([g, _num(t1), _num(t2), k, _num(v)])
    if args.out:
        _write(args.out, out.getvalue())
    try:
        crit = critical_point_find(spec)
        critical = None if crit is None else [crit.real, crit.imag]
    except InvariantViolation:
        # u is stationary along a curve (boundary correspondence not injective)
        critical = "not unique"
    summary = {
        "geodesics": count,
        "seed": args.seed,
        "min_second_difference": worst,
        "tolerance": CONVEXITY_TOL,
        "critical_point": critical,
        "passed": worst >= CONVEXITY_TOL,
    }
    _summary(args, summary)
    return EXIT_OK if summary["passed"] else EXIT_FAILED


def _deviation(a: complex, b: complex) -> float:
    if not np.isfinite(a) and not np.isfinite(b):
        return 0.0
    return float(abs(a - b))


def cmd_compare_classical(args) -> int:
    spec = load_spec(args.map)
    if not spec.is_analytic:
        raise AwliftError("compare-classical needs an analytic map (no g or q)")
    z = exterior_samples(args.samples or 200, args.seed, args.exterior_r_max)
    pts = extend_eval(ExtensionMap(spec, _grid(args)), z)
    pipeline = np.where(np.all(np.isfinite(pts), -1), pts[:, 0] + 1j * pts[:, 1], complex(np.inf, np.inf))
    classical = classical_aw(spec, z)
    mu = np.abs(beltrami_classical(spec, 1 / np.conj(z)))
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["re", "im", "pipeline_re", "pipeline_im", "classical_re", "classical_im", "deviation", "abs_mu"])
    devs = []
    for k in range(len(z)):
        d = _deviation(pipeline[k], classical[k])
        devs.append(d)
        w.writerow([_num(z[k].real), _num(z[k].imag), _num(pipeline[k].real), _num(pipeline[k].imag),
                    _num(classical[k].real), _num(classical[k].imag), _num(d), _num(mu[k])])
    if args.out:
        _write(args.out, out.getvalue())
    summary = {
        "samples": len(z),
        "seed": args.seed,
        "max_deviation": max(devs),
        "max_abs_mu": float(mu.max()),
        "tolerance": CLASSICAL_TOL,
        "passed": max(devs) < CLASSICAL_TOL,
    }
    _summary(args, summary)
    return EXIT_OK if summary["passed"] else EXIT_FAILED


COMMANDS = {
    "check": (cmd_check, "condition report; exit 0 AW, 2 Nehari only, 3 neither"),
    "mesh": (cmd_mesh, "mesh of the surface over the interior grid"),
    "extend": (cmd_extend, "mesh of the surface and its reflection"),
    "qc": (cmd_qc, "numeric dilatation of the extension against the bound"),
    "convexity": (cmd_convexity, "second differences of u along random geodesics"),
    "compare-classical": (cmd_compare_classical, "extension vs the classical formula (analytic maps)"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", required=True, help="map spec: JSON file or inline JSON object")
    common.add_argument("--n-radial", type=int, default=64)
    common.add_argument("--n-angular", type=int, default=128)
    common.add_argument("--r-max", type=float, default=0.995)
    common.add_argument("--exterior-r-max", type=float, default=1.5)
    common.add_argument("--samples", type=int, default=None,
                        help="qc: exterior samples (500); convexity: geodesics (20); compare-classical: points (200)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="main output file ('-' for stdout)")
    common.add_argument("--format", choices=("obj", "ply"), default="obj")
    common.add_argument("--report", default=None, help="JSON summary file (default: stdout)")

    parser = _Parser(prog="awlift", description="Harmonic maps, minimal-surface lifts and their reflections.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    fn = COMMANDS[args.command][0]
    try:
        return fn(args)
    except (AwliftError, ValueError, ArithmeticError, OSError) as exc:
        print(f"awlift {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
