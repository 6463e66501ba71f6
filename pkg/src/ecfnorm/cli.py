"""Command-line interface.

    ecfnorm test --input data.txt [--column NAME] [--tests all] [--format text|json]
    ecfnorm power --dists t:4,t:10 --sizes 50,100 --reps 5000 --out power.csv
    ecfnorm type1 --sizes 50,100 --reps 5000 --out type1.csv
    ecfnorm percentiles --test ep --sizes 50,100 --reps 200000 --q 0.95 --out ep.csv
    ecfnorm curves --bias --sizes 10,20,50,100,1000 --t 1 --out bias.csv
    ecfnorm replay ep.csv.manifest.json --out again.csv

Exit status: 0 on a clean run, 2 when ``test`` rejects normality for any
requested test, 1 on any error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .classical import TEST_NAMES
from .distributions import Normal, parse_spec_list
from .errors import NormalityError, ParseError
from .harness import (
    SimulationConfig,
    bias_curve,
    curve_csv,
    estimate_null_percentile,
    estimate_power,
    estimate_type1,
    null_statistics,
    percentile_table,
    variance_curve,
)
from .stat_core import DIVISORS, DEFAULT_DIVISOR, Sample, studentize
from .suite import normalize_names, run_test

EXIT_OK, EXIT_ERROR, EXIT_REJECT = 0, 1, 2
SMALL_N = 50


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 means "rejected" here.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _sizes(text: str) -> list:
    try:
        sizes = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}")
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def _float(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise ValueError(text)
    return v


def _parse_number(field: str, lineno: int) -> float:
    try:
        v = float(field)
    except ValueError:
        raise ParseError(f"not a number: {field.strip()!r}", line=lineno) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {field.strip()!r}", line=lineno)
    return v


def read_values(path, column=None) -> np.ndarray:
    """One number per line, or one CSV column selected by header name or 0-based index."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"input file not found: {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    values = []
    if column is None:
        for lineno, line in enumerate(lines, 1):
            if line.strip() and not line.lstrip().startswith("#"):
                values.append(_parse_number(line, lineno))
    else:
        rows = list(csv.reader(lines))
        start, idx = 0, None
        if column.isdigit():
            idx = int(column)
            try:
                float(rows[0][idx])
            except (ValueError, IndexError):
                start = 1  # header row
        else:
            if not rows or column not in rows[0]:
                raise ParseError(f"column {column!r} not found in header", line=1)
            idx, start = rows[0].index(column), 1
        for lineno, row in enumerate(rows[start:], start + 1):
            if not row or not any(f.strip() for f in row):
                continue
            if idx >= len(row):
                raise ParseError(f"row has no column {column}", line=lineno)
            values.append(_parse_number(row[idx], lineno))
    return np.array(values)


def _fmt(v) -> str:
    return "-" if v is None else f"{v:.6g}"


def cmd_test(args, out) -> int:
    x = read_values(args.input, args.column)
    if x.size < 2:
        raise CliError(f"need at least 2 observations, got {x.size}")
    sample = Sample(x)
    studentize(sample)  # surfaces DegenerateSample before any test runs
    if sample.n < SMALL_N:
        print(f"warning: n = {sample.n} < {SMALL_N}; the asymptotic ECFT calibration is "
              "intended for larger samples", file=sys.stderr)
    results, errors = [], []
    for name in normalize_names(args.tests):
        try:
            results.append(run_test(name, sample, args.alpha, args.t, args.divisor))
        except NormalityError as exc:
            errors.append((name, f"{type(exc).__name__}: {exc}"))
    if args.format == "json":
        doc = {"n": sample.n, "alpha": args.alpha, "t": args.t,
               "results": [r.as_dict() for r in results],
               "errors": [{"test": n, "error": e} for n, e in errors]}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(f"{'test':<6}{'statistic':>14}{'p-value':>14}{'critical':>14}  decision\n")
        for r in results:
            decision = "reject" if r.reject else "fail to reject"
            out.write(f"{r.test_name:<6}{_fmt(r.statistic):>14}{_fmt(r.p_value):>14}"
                      f"{_fmt(r.critical_value):>14}  {decision}\n")
        for name, msg in errors:
            out.write(f"{name:<6}  error: {msg}\n")
    if errors:
        return EXIT_ERROR
    return EXIT_REJECT if any(r.reject for r in results) else EXIT_OK


def _config(args, dists) -> SimulationConfig:
    try:
        return SimulationConfig(tests=args.tests, dists=tuple(dists), sizes=tuple(args.sizes), reps=args.reps,
                                alpha=args.alpha, master_seed=args.seed, t_point=args.t, divisor=args.divisor)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _table_output(table, fmt) -> str:
    return table.to_json() + "\n" if fmt == "json" else table.to_csv()


def cmd_power(args, out) -> str:
    return _table_output(estimate_power(_config(args, parse_spec_list(args.dists)), args.workers), args.format)


def cmd_type1(args, out) -> str:
    return _table_output(estimate_type1(_config(args, [Normal()]), args.workers), args.format)


def cmd_percentiles(args, out) -> str:
    name = normalize_names(args.test)[0]
    ests = [estimate_null_percentile(name, n, args.q, args.reps, args.seed, args.workers, args.t, args.divisor)
            for n in args.sizes]
    return percentile_table(ests).to_csv(quantile=args.q)


def cmd_curves(args, out) -> str:
    if args.bias:
        pts = bias_curve(args.sizes, args.reps, args.t, args.seed, args.workers, args.divisor)
        return curve_csv(pts, ("studentized", "raw"))
    if args.variance:
        pts = variance_curve(args.sizes, args.reps, args.t, args.seed, args.workers, args.divisor)
        return curve_csv(pts, ("empirical", "asymptotic"))
    # Null histogram data: standardized ECFT values, one column per n.
    cols = [null_statistics("ECFT", n, args.reps, args.seed, args.workers, args.t, args.divisor)
            for n in args.sizes]
    lines = [",".join(f"n_{n}" for n in args.sizes)]
    lines += [",".join(repr(float(c[i])) for c in cols) for i in range(args.reps)]
    return "\n".join(lines) + "\n"


def _add_sim_args(p, reps_default, tests=True):
    p.add_argument("--sizes", type=_sizes, required=True, help="comma-separated sample sizes")
    p.add_argument("--reps", type=int, default=reps_default, help="replications per cell")
    p.add_argument("--seed", type=int, default=20240101, help="master seed")
    p.add_argument("--workers", type=int, default=1, help="worker processes (does not change results)")
    p.add_argument("--t", type=_float, default=1.0, help="ECF evaluation point")
    p.add_argument("--divisor", choices=DIVISORS, default=DEFAULT_DIVISOR)
    p.add_argument("--out", help="output path (a .manifest.json is written next to it)")
    if tests:
        p.add_argument("--tests", default="all", help=f"comma-separated subset of {','.join(TEST_NAMES)} or all")
        p.add_argument("--alpha", type=_float, default=0.05)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ecfnorm",
        description="Normality tests based on the empirical characteristic function, with Monte Carlo tools.",
        epilog="Exit status: 0 clean run, 2 some test rejected normality (test command), 1 error.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run normality tests on a data file")
    p.add_argument("--input", required=True, help="one number per line, or CSV with --column")
    p.add_argument("--column", help="CSV column: header name or 0-based index")
    p.add_argument("--tests", default="all")
    p.add_argument("--alpha", type=_float, default=0.05)
    p.add_argument("--t", type=_float, default=1.0)
    p.add_argument("--divisor", choices=DIVISORS, default=DEFAULT_DIVISOR)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("power", help="rejection rates under non-normal alternatives")
    p.add_argument("--dists", required=True, help="e.g. t:4,t:10,uniform,laplace,logistic,mix:2.0:0.2")
    _add_sim_args(p, 5000)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("type1", help="rejection rates under standard normal data")
    _add_sim_args(p, 5000)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("percentiles", help="simulated null quantiles of a statistic")
    p.add_argument("--test", default="ep")
    p.add_argument("--q", type=_float, default=0.95)
    _add_sim_args(p, 200000, tests=False)

    p = sub.add_parser("curves", help="plot data: bias curve, variance curve or null histogram")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--bias", action="store_true", help="mean log-modulus of the ecf, studentized and raw")
    kind.add_argument("--variance", action="store_true", help="empirical vs asymptotic variance of v_n")
    kind.add_argument("--histogram", action="store_true", help="null values of the standardized ECFT statistic")
    _add_sim_args(p, 5000, tests=False)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out", help="write here instead of the recorded output path")
    return parser


COMMANDS = {"power": cmd_power, "type1": cmd_type1, "percentiles": cmd_percentiles, "curves": cmd_curves}


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


def _run_artifact(args, argv, out) -> int:
    started = _now()
    text = COMMANDS[args.command](args, out)
    if not args.out:
        out.write(text)
        return EXIT_OK
    path = Path(args.out)
    path.write_text(text, encoding="utf-8")
    manifest = {
        "command": args.command,
        "argv": argv,
        "config": {k: v for k, v in vars(args).items() if k not in ("out",)},
        "version": __version__,
        "master_seed": args.seed,
        "started": started,
        "finished": _now(),
        "outputs": [str(path)],
    }
    Path(str(path) + ".manifest.json").write_text(json.dumps(manifest, indent=2, default=str) + "\n",
                                                  encoding="utf-8")
    return EXIT_OK


def _replay_argv(manifest_path, out_override):
    doc = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    argv = list(doc["argv"])
    if out_override:
        if "--out" in argv:
            i = argv.index("--out")
            argv[i + 1] = out_override
        else:
            argv = [a for a in argv if not a.startswith("--out=")] + ["--out", out_override]
    return argv


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "replay":
            return main(_replay_argv(args.manifest, args.out), out)
        if args.command == "test":
            return cmd_test(args, out)
        return _run_artifact(args, argv, out)
    except (NormalityError, CliError, FileNotFoundError, OSError, ValueError) as exc:
        name = type(exc).__name__
        print(f"error: {name}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
