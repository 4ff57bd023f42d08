"""Command line front end: ``unruhqfi {qfi,sweep,optimal-n,fit,selftest}``.

Settings resolve as flags > environment > config file > defaults.  The
config file holds ``key=value`` lines named after :class:`RunConfig` fields.

Exit codes: 0 ok, 2 usage or input error, 3 convergence failure, 4 sweep
with unconverged rows.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from collections import defaultdict
from dataclasses import fields

import numpy as np

from . import study
from .errors import ConvergenceError, InsufficientDataError, ScanCapError
from .fock import ModeSpec, NoonSpec, squeezing_from_mode
from .qfi import qfi_converged
from .records import FIT_FIELDS, OPTIMAL_FIELDS, SLOPE_FIELDS, SWEEP_FIELDS, SweepPoint, fmt
from .study import RunConfig

ENV_CACHE = "UNRUHQFI_CACHE"
ENV_WORKERS = "UNRUHQFI_WORKERS"
ENV_CONFIG = "UNRUHQFI_CONFIG"

EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_PARTIAL = 0, 2, 3, 4

_CONFIG_TYPES = {
    "precision": float,
    "theta": float,
    "dim_cap": int,
    "schedule_mode": str,
    "cache_path": str,
    "workers": int,
    "output": str,
}


class UsageError(Exception):
    pass


def parse_float_grid(text: str) -> list[float]:
    """``lo:step:hi`` (inclusive), comma list, or a single value."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range {text!r} must look like lo:step:hi")
        lo, step, hi = (float(p) for p in parts)
        if step <= 0 or hi < lo:
            raise UsageError(f"range {text!r} needs step > 0 and hi >= lo")
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return [float(np.round(lo + i * step, 12)) for i in range(count)]
    return [float(p) for p in text.split(",") if p.strip()]


def parse_int_grid(text: str) -> list[int]:
    """``a..b`` (inclusive), comma list, or a single value."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise UsageError(f"range {text!r} is empty")
        return list(range(lo, hi + 1))
    return [int(p) for p in text.split(",") if p.strip()]


def _grid(parser_fn, text, flag):
    try:
        values = parser_fn(text)
    except ValueError as exc:
        raise UsageError(f"bad {flag} value {text!r}: {exc}") from None
    if not values:
        raise UsageError(f"{flag} is empty")
    return values


def read_config_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in _CONFIG_TYPES:
                raise UsageError(f"{path}:{lineno}: expected one of {sorted(_CONFIG_TYPES)} as key=value")
            value = value.strip()
            out[key] = None if value.lower() in ("", "none") else _CONFIG_TYPES[key](value)
    return out


def resolve_config(args, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    values: dict = {}
    cfg_path = args.config or environ.get(ENV_CONFIG)
    if cfg_path:
        values.update(read_config_file(cfg_path))
    if environ.get(ENV_CACHE):
        values["cache_path"] = environ[ENV_CACHE]
    if environ.get(ENV_WORKERS):
        values["workers"] = int(environ[ENV_WORKERS])
    flags = {
        "precision": args.precision,
        "theta": args.theta,
        "dim_cap": args.dim_cap,
        "schedule_mode": args.schedule,
        "cache_path": args.cache,
        "workers": args.workers,
        "output": args.output,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    if args.no_cache:
        values["cache_path"] = None
    known = {f.name for f in fields(RunConfig)}
    try:
        return RunConfig(**{k: v for k, v in values.items() if k in known})
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def emit(rows: list[dict], header, config: RunConfig, out, key="rows"):
    if config.output == "json":
        json.dump({key: rows}, out, indent=1)
        out.write("\n")
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(row[h]) for h in header])


def _common(p):
    g = p.add_argument_group("run configuration")
    g.add_argument("--precision", type=float, help="absolute QFI precision (default 1e-5)")
    g.add_argument("--theta", type=float, help="phase used to build the state (default 0.4)")
    g.add_argument("--dim-cap", type=int, help="largest truncation per mode")
    g.add_argument("--schedule", choices=["accelerated", "unit-step"], help="cutoff growth policy")
    g.add_argument("--cache", help="result cache file")
    g.add_argument("--no-cache", action="store_true", help="ignore any configured cache")
    g.add_argument("--workers", type=int, help="worker processes")
    g.add_argument("--output", choices=["csv", "json"])
    g.add_argument("--config", help="key=value config file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unruhqfi", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qfi", help="converged QFI at one (encoding, N, r)")
    p.add_argument("--encoding", choices=["single", "dual"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float)
    p.add_argument("--omega", type=float, help="mode frequency (with --accel)")
    p.add_argument("--accel", type=float, help="proper acceleration (with --omega)")
    _common(p)

    p = sub.add_parser("sweep", help="QFI along N or along r")
    p.add_argument("--axis", choices=["n", "r"], required=True)
    p.add_argument("--encoding", choices=["single", "dual"], required=True)
    p.add_argument("--n", required=True, help="N value, or a..b / comma list for --axis n")
    p.add_argument("--r", required=True, help="r value, or lo:step:hi / comma list for --axis r")
    _common(p)

    p = sub.add_parser("optimal-n", help="N maximizing the QFI for each r")
    p.add_argument("--encoding", choices=["single", "dual"], required=True)
    p.add_argument("--r", required=True, help="lo:step:hi or comma list, all > 0")
    p.add_argument("--n-cap", type=int, default=200)
    _common(p)

    p = sub.add_parser("fit", help="fit F = N^2 exp(-a N + b) per r, and the slope of a(r)")
    p.add_argument("--input", help="sweep CSV (omit to compute from --encoding/--n/--r)")
    p.add_argument("--encoding", choices=["single", "dual"])
    p.add_argument("--n", help="N grid for inline sweeps")
    p.add_argument("--r", help="r grid for inline sweeps")
    p.add_argument("--n-min", type=int, help="first N in each fit (default: one past the peak)")
    p.add_argument("--window", help="r_lo:r_hi for the slope of a(r)")
    _common(p)

    p = sub.add_parser("selftest", help="run the invariant checks")
    _common(p)
    return parser


def _cmd_qfi(args, config, out):
    if args.r is not None and (args.omega is not None or args.accel is not None):
        raise UsageError("give either --r or --omega/--accel, not both")
    if args.r is None:
        if args.omega is None or args.accel is None:
            raise UsageError("give --r, or both --omega and --accel")
        try:
            r = squeezing_from_mode(ModeSpec(args.omega, args.accel))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        r = args.r
    try:
        spec = NoonSpec(args.encoding, args.n, config.theta)
        res = qfi_converged(spec, r, config.precision, schedule=config.schedule_mode, dim_cap=config.dim_cap)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for dim, value in exc.history:
            print(f"  dim={dim} qfi={fmt(float(value))}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    row = {
        "encoding": spec.encoding.value,
        "n": spec.n,
        "r": float(r),
        "theta": spec.theta,
        "precision": config.precision,
        "qfi": res.value,
        "dim_used": res.dim_used,
        "converged": res.converged,
        "trace_deficit": res.trace_deficit,
        "delta_theta": study.cramer_rao_bound(res.value) if res.value > 0 else float("inf"),
    }
    emit([row], list(row), config, out)
    return EXIT_OK


def _cmd_sweep(args, config, out):
    if args.axis == "n":
        n_list = sorted(_grid(parse_int_grid, args.n, "--n"))
        (r,) = _single(_grid(parse_float_grid, args.r, "--r"), "--r")
        _check_positive_n(n_list)
        points = study.sweep_over_n(args.encoding, r, n_list, config=config)
    else:
        r_list = sorted(_grid(parse_float_grid, args.r, "--r"))
        (n,) = _single(_grid(parse_int_grid, args.n, "--n"), "--n")
        _check_positive_n([n])
        if r_list[0] < 0:
            raise UsageError("r must be >= 0")
        points = study.sweep_over_r(args.encoding, n, r_list, config=config)
    emit([p.as_dict() for p in points], SWEEP_FIELDS, config, out)
    return EXIT_OK if all(p.converged for p in points) else EXIT_PARTIAL


def _single(values, flag):
    if len(values) != 1:
        raise UsageError(f"{flag} takes a single value on this axis")
    return values


def _check_positive_n(ns):
    if min(ns) < 1:
        raise UsageError("N must be >= 1")


def _cmd_optimal(args, config, out):
    rs = _grid(parse_float_grid, args.r, "--r")
    if any(r <= 0 for r in rs):
        raise UsageError("every r must be > 0: the optimal N diverges at r = 0")
    rows = []
    for r in rs:
        try:
            best = study.optimal_n(args.encoding, r, config=config, n_cap=args.n_cap)
        except ScanCapError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONVERGENCE
        except ConvergenceError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONVERGENCE
        rows.append({"encoding": args.encoding, "r": best.r, "n_star": best.n_star, "f_star": best.f_star, "scan_upper": best.scan_upper})
    emit(rows, OPTIMAL_FIELDS, config, out)
    return EXIT_OK


def read_sweep_csv(fh) -> list[SweepPoint]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != SWEEP_FIELDS:
        raise UsageError(f"line 1: header must be {','.join(SWEEP_FIELDS)}")
    points = []
    for lineno, row in enumerate(reader, 2):
        if not row:
            continue
        if len(row) != len(SWEEP_FIELDS):
            raise UsageError(f"line {lineno}: expected {len(SWEEP_FIELDS)} fields, got {len(row)}")
        try:
            point, _ = SweepPoint.from_row(dict(zip(SWEEP_FIELDS, row)))
        except (ValueError, KeyError) as exc:
            raise UsageError(f"line {lineno}: {exc}") from None
        points.append(point)
    return points


def _cmd_fit(args, config, out):
    if args.input:
        try:
            with open(args.input, newline="") as fh:
                points = read_sweep_csv(fh)
        except OSError as exc:
            raise UsageError(str(exc)) from None
    else:
        if not (args.encoding and args.n and args.r):
            raise UsageError("give --input, or --encoding with --n and --r grids")
        ns = sorted(_grid(parse_int_grid, args.n, "--n"))
        _check_positive_n(ns)
        points = []
        for r in sorted(_grid(parse_float_grid, args.r, "--r")):
            points += study.sweep_over_n(args.encoding, r, ns, config=config)
    groups = defaultdict(list)
    for p in points:
        if p.converged:
            groups[(p.encoding.value, p.r)].append(p)
    fits = []
    try:
        for key in sorted(groups):
            fits.append(study.fit_decay(groups[key], args.n_min))
        slope = None
        if args.window:
            lo, sep, hi = args.window.partition(":")
            if not sep:
                raise UsageError("--window must look like r_lo:r_hi")
            slope = study.slope_of_a(fits, float(lo), float(hi))
    except InsufficientDataError as exc:
        print(f"error: insufficient data: {exc}", file=sys.stderr)
        return EXIT_USAGE
    fit_rows = [
        {"r": f.r, "a_coeff": f.a_coeff, "b_coeff": f.b_coeff, "residual_sum": f.residual_sum, "n_min": f.n_range[0], "n_max": f.n_range[1]}
        for f in fits
    ]
    slope_row = None
    if slope is not None:
        slope_row = {"gradient": slope.gradient, "stderr": slope.stderr, "r_lo": slope.r_window[0], "r_hi": slope.r_window[1], "n_fits": slope.n_fits}
    if config.output == "json":
        json.dump({"fits": fit_rows, "slope": slope_row}, out, indent=1)
        out.write("\n")
    else:
        emit(fit_rows, FIT_FIELDS, config, out)
        if slope_row is not None:
            out.write("\n")
            emit([slope_row], SLOPE_FIELDS, config, out)
    return EXIT_OK


def _cmd_selftest(args, config, out):
    from .selftest import run_all

    results = run_all(config)
    for name, ok, detail in results:
        out.write(f"{'PASS' if ok else 'FAIL'} {name}: {detail}\n")
    return EXIT_OK if all(ok for _, ok, _ in results) else 1


COMMANDS = {"qfi": _cmd_qfi, "sweep": _cmd_sweep, "optimal-n": _cmd_optimal, "fit": _cmd_fit, "selftest": _cmd_selftest}


def main(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    out = out or sys.stdout
    buf = io.StringIO()
    try:
        config = resolve_config(args)
        code = COMMANDS[args.command](args, config, buf)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
