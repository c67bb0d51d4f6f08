"""Command-line front end: ``rebitlab {sample,hist,mean-vs,curves,verify}``.

Every CSV starts with ``#`` metadata lines (tool version, configuration,
master seed) followed by a header row. Floats are written with 17
significant digits; not-applicable values are empty fields.

Exit codes: 0 ok, 1 configuration error, 2 I/O error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from rebitlab import __version__, analytics, checks, estimation, runner
from rebitlab.entanglement import COLUMNS, UNITS
from rebitlab.sampling import DEFAULT_CHUNK_SIZE, EnsembleKind, SeedSpec

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3

HIST_COLUMNS = ("c_cfr", "e_cfr", "c_wootters", "e_wootters", "participation_ratio", "lambda_max", "entropy_vn")
DEFAULT_RANGES = {
    "c_cfr": (0.0, 1.0),
    "e_cfr": (0.0, 1.0),
    "c_wootters": (0.0, 1.0),
    "e_wootters": (0.0, 1.0),
    "participation_ratio": (1.0, 4.0),
    "lambda_max": (0.25, 1.0),
    "entropy_vn": (0.0, math.log(4.0)),
    "purity": (0.25, 1.0),
}


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return "%.17g" % (x + 0.0)


def _format_column(a: np.ndarray) -> np.ndarray:
    s = np.char.mod("%.17g", np.asarray(a, dtype=float) + 0.0)
    return np.where(np.isnan(a), "", s)


def _metadata(args, command: str, extra: dict | None = None) -> list[str]:
    # worker count is deliberately omitted: it never changes the content
    cfg = {
        "ensemble": getattr(args, "ensemble", None),
        "n": getattr(args, "n", None),
        "seed": getattr(args, "seed", None),
        "chunk_size": getattr(args, "chunk_size", None),
        "bins": getattr(args, "bins", None),
    }
    cfg.update(extra or {})
    body = " ".join(f"{k}={v}" for k, v in cfg.items() if v is not None)
    lines = [
        f"# rebitlab {__version__}",
        f"# command: {command}",
        f"# config: {body}",
        f"# master_seed: {getattr(args, 'seed', '')}",
    ]
    return lines


def _open_out(path: str):
    if path == "-":
        return sys.stdout, False
    p = Path(path)
    return p.open("w", newline="", encoding="utf-8"), True


def _seed(args) -> SeedSpec:
    try:
        return SeedSpec(args.seed, args.chunk_size)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_sample(args) -> int:
    seed = _seed(args)
    kind = EnsembleKind(args.ensemble)
    fh, close = _open_out(args.out)
    try:
        for line in _metadata(args, "sample"):
            fh.write(line + "\n")
        for col in COLUMNS:
            fh.write(f"# column {col}: {UNITS[col]}\n")
        fh.write(",".join(COLUMNS) + "\n")
        for rec in runner.iter_records(kind, args.n, seed, args.workers):
            cols = [_format_column(rec[c]) for c in COLUMNS]
            rows = [",".join(r) for r in zip(*cols)]
            fh.write("\n".join(rows) + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def read_records(path: str) -> dict[str, np.ndarray]:
    """Load a ``sample`` CSV back into record columns (empty fields become NaN)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader)
        data = [[float(v) if v else math.nan for v in row] for row in reader if row]
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return {name: arr[:, i] for i, name in enumerate(header)}


def _record_stream(args):
    if args.input:
        yield read_records(args.input)
        return
    yield from runner.iter_records(EnsembleKind(args.ensemble), args.n, _seed(args), args.workers)


def _require_column(name: str, allowed) -> None:
    if name not in allowed:
        raise ConfigError(f"unknown column {name!r}; choose from {', '.join(allowed)}")


def cmd_hist(args) -> int:
    _require_column(args.column, HIST_COLUMNS)
    lo, hi = args.range if args.range else DEFAULT_RANGES[args.column]
    hist = estimation.Histogram(lo, hi, args.bins)
    for rec in _record_stream(args):
        values = rec[args.column]
        if np.all(np.isnan(values)):
            raise ConfigError(f"column {args.column} is not defined for this ensemble")
        hist = hist.accumulate(values)
    rows = estimation.hist_density_with_errors(hist)
    fh, close = _open_out(args.out)
    try:
        extra = {"column": args.column, "range": f"{lo:g}:{hi:g}", "input": args.input}
        for line in _metadata(args, "hist", extra):
            fh.write(line + "\n")
        fh.write(f"# total={hist.total} underflow={hist.underflow} overflow={hist.overflow}\n")
        fh.write("bin_center,density,stderr\n")
        for c, d, e in rows:
            fh.write(f"{fmt(c)},{fmt(d)},{fmt(e)}\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_mean_vs(args) -> int:
    _require_column(args.x, HIST_COLUMNS)
    for y in args.y:
        _require_column(y, HIST_COLUMNS)
    lo, hi = args.range if args.range else DEFAULT_RANGES[args.x]
    edges = lo + (hi - lo) * np.arange(args.bins + 1) / args.bins
    stats = {y: estimation.BinnedStat(edges) for y in args.y}
    for rec in _record_stream(args):
        for y in args.y:
            if np.all(np.isnan(rec[y])):
                raise ConfigError(f"column {y} is not defined for this ensemble")
            stats[y] = stats[y].accumulate(rec[args.x], rec[y])
    first = stats[args.y[0]]
    fh, close = _open_out(args.out)
    try:
        extra = {"x": args.x, "y": "+".join(args.y), "range": f"{lo:g}:{hi:g}", "input": args.input}
        for line in _metadata(args, "mean-vs", extra):
            fh.write(line + "\n")
        header = ["x_center"] + [f"mean_{y}" for y in args.y] + [f"stderr_{y}" for y in args.y] + ["count"]
        fh.write(",".join(header) + "\n")
        means = [stats[y].means() for y in args.y]
        errs = [stats[y].stderrs() for y in args.y]
        for i, xc in enumerate(first.centers):
            vals = [fmt(xc)] + [fmt(m[i]) for m in means] + [fmt(e[i]) for e in errs] + [str(int(first.count[i]))]
            fh.write(",".join(vals) + "\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def curve_tables(resolution: int) -> dict[str, tuple[list[str], list[tuple]]]:
    """Analytic tables keyed by output file stem."""
    n = resolution
    boundary = []
    for k in range(n + 1):
        r = 1.0 + 3.0 * k / n
        boundary.append((r, analytics.boundary_c2_max(r)))
    pure = analytics.pure_entanglement_density_curve(max(n, 2))
    family = []
    for k in range(n + 1):
        beta = (2 * k - n) / (2 * n) + 0.0
        family.append((beta, *analytics.maximal_family_metrics(beta)))
    return {
        "boundary": (["participation_ratio", "c2_max"], boundary),
        "pure_density": (["entanglement", "density"], [tuple(p) for p in pure]),
        "family": (["beta", "expectation_sigma_yy", "c_squared", "participation_ratio"], family),
    }


def cmd_curves(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for stem, (header, rows) in curve_tables(args.bins).items():
        with (outdir / f"{stem}.csv").open("w", newline="", encoding="utf-8") as fh:
            for line in _metadata(args, "curves", {"table": stem}):
                fh.write(line + "\n")
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(fmt(v) for v in row) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    ctx = checks.Context(master_seed=args.seed, scale=args.scale, workers=args.workers, chunk_size=args.chunk_size)
    if args.corrupt_boundary:
        ctx.boundary = lambda r: 0.5 * analytics.boundary_c2_max(r)
    results = checks.run_all(ctx)
    lines = [r.line() for r in results]
    failed = [r.name for r in results if not r.passed]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        lines.append("failed: " + "; ".join(failed))
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if args.out and args.out != "-":
        Path(args.out).write_text(report, encoding="utf-8")
    return EXIT_VERIFY if failed else EXIT_OK


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _workers(text: str):
    if text == "auto":
        return text
    return _positive_int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rebitlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rebitlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, sampling_flags=True, out_default="-"):
        if sampling_flags:
            p.add_argument("--ensemble", choices=[k.value for k in EnsembleKind], default="real-mixed")
            p.add_argument("--n", type=_positive_int, default=100_000, help="number of samples")
            p.add_argument("--workers", type=_workers, default=1, help="worker processes or 'auto'")
            p.add_argument("--chunk-size", type=_positive_int, default=DEFAULT_CHUNK_SIZE)
        p.add_argument("--seed", type=int, default=20020101, help="64-bit master seed")
        p.add_argument("--out", default=out_default)

    p = sub.add_parser("sample", help="write one StateRecord row per sampled state")
    common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("hist", help="density histogram of one observable")
    common(p)
    p.add_argument("--column", default="e_cfr")
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--input", help="read records from a prior sample CSV instead of sampling")
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("mean-vs", help="binned conditional means of observables")
    common(p)
    p.add_argument("--x", default="participation_ratio")
    p.add_argument("--y", nargs="+", default=["e_cfr", "e_wootters"])
    p.add_argument("--bins", type=int, default=60)
    p.add_argument("--range", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--input")
    p.set_defaults(func=cmd_mean_vs)

    p = sub.add_parser("curves", help="analytic boundary, pure-state density and extremal family")
    common(p, sampling_flags=False, out_default="curves")
    p.add_argument("--bins", type=int, default=100, help="grid resolution")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--scale", type=float, default=1.0, help="multiplier on every sample size")
    p.add_argument("--workers", type=_workers, default=1)
    p.add_argument("--chunk-size", type=_positive_int, default=DEFAULT_CHUNK_SIZE)
    p.add_argument("--corrupt-boundary", action="store_true", help=argparse.SUPPRESS)
    common(p, sampling_flags=False, out_default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "bins", 2) is not None and getattr(args, "bins", 2) < 2:
            raise ConfigError("--bins must be at least 2")
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")
        if getattr(args, "scale", 1.0) <= 0:
            raise ConfigError("--scale must be positive")
        return args.func(args)
    except ConfigError as exc:
        print(f"rebitlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"rebitlab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())
