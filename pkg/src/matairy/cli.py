"""Command-line front end: ``eval``, ``sweep``, ``calibrate`` and ``check``.

Exit codes: 0 success, 2 usage or domain error, 1 numerical failure (with a
JSON diagnostic on standard error).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import AiryError, ConfluentSpectrum, DimensionMismatch, DomainError, InvalidGrid
from .matrix_airy import (
    REPRESENTATIONS,
    CalibrationTable,
    calibrate,
    evaluate,
    load_calibrations,
    resolve_tag,
    save_calibrations,
)
from .oscillatory_quad import DEFAULT_CONFIG, QuadratureConfig
from .spectra import MatrixArgument, Spectrum, split
from .verification import SUITES, run_suite

DEFAULT_CALIBRATION = "matairy_calibration.json"
CSV_HEADER = ("xi", "r", "re", "im", "err")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(v: float) -> str:
    """Fixed 15-significant-digit rendering, independent of locale."""
    v = float(v)
    if v == 0.0:
        return "0"
    return format(v, ".15g")


def parse_axis(text: str) -> np.ndarray:
    """``value`` or ``start:stop:count``."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) != 3:
            raise ValueError
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad grid spec {text!r}; expected value or start:stop:count") from exc
    if count < 1 or stop < start:
        raise UsageError(f"bad grid spec {text!r}: need count >= 1 and stop >= start")
    return np.linspace(start, stop, count)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key=value quadrature overrides")
    common.add_argument("--out", help="output path (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--calibration", default=DEFAULT_CALIBRATION,
                        help="calibration table file (read by eval/sweep, written by calibrate)")

    point = _Parser(add_help=False)
    point.add_argument("--rep", default="n2_single_eq12",
                       help="representation tag: " + ", ".join(REPRESENTATIONS))
    point.add_argument("--xi", help="trace average xi (or start:stop:count for sweep)")
    point.add_argument("--r", help="N=2 eigenvalue gap q1 - q2 (or start:stop:count)")
    point.add_argument("--spectrum", help="eigenvalues of X, comma separated")

    parser = _Parser(prog="matairy", description="Matrix Airy function evaluation and checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("eval", parents=[common, point], help="evaluate one point")
    sw = sub.add_parser("sweep", parents=[common, point], help="evaluate on a grid")
    sw.add_argument("--grid", help="alias for the xi axis, start:stop:count")
    cal = sub.add_parser("calibrate", parents=[common, point], help="fit representation constants")
    cal.add_argument("--reps", help="comma-separated tags (default: all applicable)")
    chk = sub.add_parser("check", parents=[common], help="run verification suites")
    chk.add_argument("--suite", choices=SUITES, default="all")
    chk.add_argument("--samples", type=int, default=10**6, help="Monte Carlo samples")
    return parser


def _config(args) -> QuadratureConfig:
    if not args.config:
        return DEFAULT_CONFIG
    try:
        return QuadratureConfig.from_file(args.config)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc


def _point(args) -> MatrixArgument:
    if args.spectrum:
        if args.xi is not None or args.r is not None:
            raise UsageError("--spectrum excludes --xi/--r")
        return split(Spectrum.parse(args.spectrum).values)
    if args.xi is None:
        raise UsageError("need --spectrum or --xi")
    xi = _float(args.xi, "--xi")
    if args.r is None:
        return MatrixArgument(xi, Spectrum((0.0,)))
    return MatrixArgument.from_xi_r(xi, _float(args.r, "--r"))


def _float(text: str, flag: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"{flag} expects a number, got {text!r}") from exc


def _kappa(args, tag: str, N: int) -> tuple[complex, bool]:
    path = Path(args.calibration)
    if not path.exists():
        return 1.0 + 0.0j, False
    tables = load_calibrations(path)
    table = tables.get(N)
    if table is None or tag not in table.kappas:
        return 1.0 + 0.0j, False
    return table.kappas[tag], True


def _row(X: MatrixArgument, value: complex, err: float) -> dict:
    return {
        "xi": X.xi,
        "r": X.r if X.N == 2 else None,
        "traceless": list(X.traceless.values),
        "value": {"re": float(value.real), "im": float(value.imag)},
        "err": float(err),
    }


def _render(rows: list[dict], fmt_name: str, meta: dict) -> str:
    if fmt_name == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            r = "" if row["r"] is None else fmt(row["r"])
            writer.writerow([fmt(row["xi"]), r, fmt(row["value"]["re"]), fmt(row["value"]["im"]),
                             fmt(row["err"])])
        return buf.getvalue()
    return json.dumps({**meta, "points": rows}, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _evaluate_rows(args, cfg, points: list[MatrixArgument]) -> tuple[list[dict], dict]:
    tag = resolve_tag(args.rep)
    N = points[0].N
    if not REPRESENTATIONS[tag].supports(N):
        raise DomainError(f"{tag} does not support N={N}")
    kappa, calibrated = _kappa(args, tag, N)
    rows = []
    for X in points:
        ev = evaluate(tag, X, cfg)
        rows.append(_row(X, kappa * ev.value, abs(kappa) * ev.error_estimate))
    meta = {"rep": tag, "N": N, "calibrated": calibrated,
            "kappa": {"re": kappa.real, "im": kappa.imag}, "config": cfg.to_dict()}
    return rows, meta


def cmd_eval(args) -> int:
    cfg = _config(args)
    rows, meta = _evaluate_rows(args, cfg, [_point(args)])
    _emit(_render(rows, args.format or "csv", meta), args.out)
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    if args.spectrum:
        raise UsageError("sweep takes --xi/--grid and optionally --r, not --spectrum")
    xi_spec = args.grid or args.xi
    if xi_spec is None:
        raise UsageError("sweep needs --xi or --grid")
    if args.grid and args.xi:
        raise UsageError("--grid and --xi both set the xi axis")
    xis = parse_axis(xi_spec)
    if args.r is None:
        points = [MatrixArgument(float(x), Spectrum((0.0,))) for x in xis]
    else:
        rs = parse_axis(args.r)
        points = [MatrixArgument.from_xi_r(float(x), float(r)) for x in xis for r in rs]
    rows, meta = _evaluate_rows(args, cfg, points)
    _emit(_render(rows, args.format or "csv", meta), args.out)
    return 0


def cmd_calibrate(args) -> int:
    cfg = _config(args)
    X = _point(args) if (args.spectrum or args.xi is not None) else MatrixArgument.from_xi_r(0.0, 1.0)
    reps = [resolve_tag(t.strip()) for t in args.reps.split(",")] if args.reps else None
    table = calibrate(reps, X, cfg)
    path = Path(args.out or args.calibration)
    tables: dict[int, CalibrationTable] = load_calibrations(path) if path.exists() else {}
    tables[table.N] = table
    save_calibrations(tables.values(), path)
    sys.stdout.write(json.dumps(table.to_dict(), indent=2, sort_keys=True) + "\n")
    return 0


def cmd_check(args) -> int:
    cfg = _config(args)
    report = run_suite(args.suite, args.seed, cfg, args.samples)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    _emit(text, args.out)
    return 0 if report["passed"] else 1


VALUE_FLAGS = ("--xi", "--r", "--grid", "--spectrum")


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    """Join ``--xi -3:3:61`` into ``--xi=-3:3:61`` so negative values parse."""
    out, i = [], 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and argv[i + 1][1:2].replace(".", "").isdigit():
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


COMMANDS = {"eval": cmd_eval, "sweep": cmd_sweep, "calibrate": cmd_calibrate, "check": cmd_check}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        argv = sys.argv[1:] if argv is None else argv
        args = parser.parse_args(_attach_negative_values(argv))
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except (DomainError, InvalidGrid, ConfluentSpectrum, DimensionMismatch) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except AiryError as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(diag, sort_keys=True) + "\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
