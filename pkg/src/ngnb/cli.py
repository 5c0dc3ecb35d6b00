"""``ngnb`` command line: every subcommand writes CSV.

Exit codes are 0 on success, 2 for usage or domain errors and 3 for numerical
failures; on failure the exception class name goes to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO

from . import approx, distribution, limits
from .errors import DomainError, NgnbError, NumericalError
from .series import DEFAULT_EPSILON, NgnbParams

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

EPSILON_ENV = "NGNB_EPSILON"

_T12_GAMMAS = (0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
_TABLE_KS = (5, 6, 7, 8, 9, 10)

# axes of the three published moment tables
TABLE_GRIDS: dict[int, approx.GridSpec] = {
    1: approx.GridSpec(_T12_GAMMAS, (0.1, 0.2, 0.3, 0.4, 0.5), _TABLE_KS),
    2: approx.GridSpec(_T12_GAMMAS, (0.6, 0.7, 0.8, 0.9), _TABLE_KS),
    3: approx.GridSpec((1.2, 1.4, 1.5, 1.6, 1.8, 2.0), (0.2, 0.4, 0.5, 0.6, 0.7, 0.8), _TABLE_KS),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    epsilon: float = DEFAULT_EPSILON
    seed: int = 0
    output_path: str | None = None
    options: dict = field(default_factory=dict)


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    return format(float(x), ".17g")


def _floats(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    if not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError(f"non-finite value in {text!r}")
    return values


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text!r}")
    return value


def _seed(text: str) -> int:
    value = _nonneg_int(text)
    if value >= 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _epsilon(text: str) -> float:
    value = _finite(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1), got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--epsilon", type=_epsilon, default=None,
                        help=f"series tolerance (default ${EPSILON_ENV} or {DEFAULT_EPSILON:g})")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", default=None, help="output file (default stdout)")

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--gamma", type=_finite, required=True)
    params.add_argument("--k", type=_finite, required=True)
    params.add_argument("--q", type=_finite, required=True)

    parser = argparse.ArgumentParser(prog="ngnb", description="NGNB distribution tools (CSV output)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pmf", parents=[common, params], help="pmf, cdf, survival and hazard for y = 0..ymax")
    p.add_argument("--ymax", type=_nonneg_int, required=True)

    p = sub.add_parser("table", parents=[common], help="exact and approximate moments over a published table's cells")
    p.add_argument("--table", type=int, choices=sorted(TABLE_GRIDS), required=True)

    p = sub.add_parser("errors", parents=[common], help="grid summary of approximation errors, then per-point rows")
    p.add_argument("--preset", choices=sorted(approx.PRESETS), default=None)
    p.add_argument("--gammas", type=_floats)
    p.add_argument("--qs", type=_floats)
    p.add_argument("--ks", type=_floats)
    p.add_argument("--round", type=_nonneg_int, default=None, dest="round_to",
                   help="round every moment to this many decimals before differencing")

    p = sub.add_parser("hazard-curve", parents=[common], help="failure rates, one column per gamma")
    p.add_argument("--gammas", type=_floats, required=True)
    p.add_argument("--k", type=_finite, default=3.0)
    p.add_argument("--q", type=_finite, default=0.2)
    p.add_argument("--ylimit", type=_nonneg_int, default=50)

    p = sub.add_parser("converge", parents=[common], help="TV distance to the COM-Poisson limit")
    p.add_argument("--gamma", type=_finite, required=True)
    p.add_argument("--lambda", type=_finite, required=True, dest="lam")
    p.add_argument("--ks", type=_floats, required=True)

    p = sub.add_parser("sample", parents=[common, params], help="random draws")
    p.add_argument("--n", type=_nonneg_int, required=True)

    p = sub.add_parser("fit", parents=[common], help="maximum-likelihood fit to a column of counts")
    p.add_argument("--input", required=True, help="CSV with a header 'y'")
    return parser


def resolve_epsilon(flag: float | None, environ=os.environ) -> float:
    if flag is not None:
        return flag
    raw = environ.get(EPSILON_ENV)
    if raw is None or raw == "":
        return DEFAULT_EPSILON
    try:
        return _epsilon(raw)
    except argparse.ArgumentTypeError as exc:
        raise UsageError(f"{EPSILON_ENV}: {exc}")


def _writer(stream: TextIO):
    return csv.writer(stream, lineterminator="\n")


def _params(args) -> NgnbParams:
    return NgnbParams(args.gamma, args.k, args.q)


def cmd_pmf(cfg: RunConfig, out: TextIO) -> None:
    o = cfg.options
    table = distribution.build(o["params"], cfg.epsilon, y_min=o["ymax"])
    w = _writer(out)
    w.writerow(["y", "pmf", "cdf", "survival", "hazard"])
    for y in range(o["ymax"] + 1):
        w.writerow([y] + [fmt(v) for v in (
            distribution.pmf(table, y),
            distribution.cdf(table, y),
            distribution.survival(table, y),
            distribution.hazard(table, y),
        )])


_MOMENT_FIELDS = ("mean_exact", "mean_approx", "var_exact", "var_approx")


def cmd_table(cfg: RunConfig, out: TextIO) -> None:
    grid = TABLE_GRIDS[cfg.options["table"]]
    w = _writer(out)
    w.writerow(["q", "k", "gamma", *_MOMENT_FIELDS, *(f + "_2dp" for f in _MOMENT_FIELDS)])
    for r in approx.iter_reports(grid, cfg.epsilon):
        values = [getattr(r, f) for f in _MOMENT_FIELDS]
        rounded = [format(approx.round_half_away(v, 2), ".2f") for v in values]
        w.writerow([repr(r.params.q), repr(r.params.k), repr(r.params.gamma), *map(fmt, values), *rounded])


_ERROR_HEADER = [
    "kind", "q", "k", "gamma", "n_points",
    "mean_exact", "mean_approx", "var_exact", "var_approx", "mean_error", "var_error",
    "mean_avg_error", "mean_mse", "var_avg_error", "var_mse",
]


def cmd_errors(cfg: RunConfig, out: TextIO) -> None:
    grid = cfg.options["grid"]
    reports = list(approx.iter_reports(grid, cfg.epsilon, round_to=cfg.options["round_to"]))
    s = approx.summarize_reports(grid, reports)
    w = _writer(out)
    w.writerow(_ERROR_HEADER)
    w.writerow(["summary", "", "", "", s.n_points, "", "", "", "", "", "",
                *map(fmt, (s.mean_avg_error, s.mean_mse, s.var_avg_error, s.var_mse))])
    for r in reports:
        p = r.params
        w.writerow(["point", *map(repr, (p.q, p.k, p.gamma)), "",
                    *map(fmt, (r.mean_exact, r.mean_approx, r.var_exact, r.var_approx,
                               r.mean_error, r.var_error)),
                    "", "", "", ""])


def cmd_hazard_curve(cfg: RunConfig, out: TextIO) -> None:
    o = cfg.options
    curves = [
        distribution.hazard_curve(distribution.build(p, cfg.epsilon, y_min=o["ylimit"]), o["ylimit"])
        for p in o["params"]
    ]
    w = _writer(out)
    w.writerow(["y", *(f"gamma_{p.gamma:g}" for p in o["params"])])
    for i in range(o["ylimit"] + 1):
        w.writerow([i, *(fmt(c.rates[i]) for c in curves)])


def cmd_converge(cfg: RunConfig, out: TextIO) -> None:
    o = cfg.options
    profile = limits.convergence_profile(o["gamma"], o["lam"], o["ks"], cfg.epsilon)
    w = _writer(out)
    w.writerow(["k", "q", "tv"])
    for pt in profile:
        w.writerow([repr(pt.k), repr(pt.q), fmt(pt.tv)])


def cmd_sample(cfg: RunConfig, out: TextIO) -> None:
    o = cfg.options
    draws = distribution.sample(distribution.build(o["params"], cfg.epsilon), o["n"], cfg.seed)
    out.write("y\n")
    out.write("".join(f"{int(d)}\n" for d in draws))


def read_counts(path: str) -> list[int]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise UsageError(f"{path} is empty")
    if [c.strip() for c in rows[0]] != ["y"]:
        raise UsageError(f"{path}: expected a single column with header 'y'")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 1:
            raise UsageError(f"{path}:{lineno}: expected one value per row")
        try:
            value = int(row[0].strip())
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not an integer: {row[0]!r}")
        if value < 0:
            raise UsageError(f"{path}:{lineno}: counts must be nonnegative")
        data.append(value)
    if not data:
        raise UsageError(f"{path} has no data rows")
    return data


def cmd_fit(cfg: RunConfig, out: TextIO) -> None:
    data = read_counts(cfg.options["input"])
    res = distribution.fit_mle(data, full=True)
    w = _writer(out)
    w.writerow(["gamma", "k", "q", "log_likelihood", "n"])
    w.writerow([*map(fmt, (res.params.gamma, res.params.k, res.params.q, res.log_likelihood)), len(data)])


COMMANDS: dict[str, Callable[[RunConfig, TextIO], None]] = {
    "pmf": cmd_pmf,
    "table": cmd_table,
    "errors": cmd_errors,
    "hazard-curve": cmd_hazard_curve,
    "converge": cmd_converge,
    "sample": cmd_sample,
    "fit": cmd_fit,
}


def make_config(args: argparse.Namespace) -> RunConfig:
    """Validate every flag and assemble a :class:`RunConfig` before any work."""
    cfg = RunConfig(args.command, resolve_epsilon(args.epsilon), args.seed, args.out)
    o = cfg.options
    cmd = args.command
    if cmd in ("pmf", "sample"):
        o["params"] = _params(args)
        if cmd == "pmf":
            o["ymax"] = args.ymax
        elif args.n < 1:
            raise UsageError("--n must be at least 1")
        else:
            o["n"] = args.n
    elif cmd == "table":
        o["table"] = args.table
    elif cmd == "errors":
        explicit = (args.gammas, args.qs, args.ks)
        if args.preset is not None:
            if any(v is not None for v in explicit):
                raise UsageError("--preset cannot be combined with --gammas/--qs/--ks")
            o["grid"] = approx.PRESETS[args.preset]
        elif all(v is None for v in explicit):
            o["grid"] = approx.PRESETS["gamma-lt-1"]
        elif any(v is None for v in explicit):
            raise UsageError("--gammas, --qs and --ks must be given together")
        else:
            o["grid"] = approx.GridSpec(*explicit)
        list(o["grid"].points())  # NgnbParams validates each point
        o["round_to"] = args.round_to
    elif cmd == "hazard-curve":
        o["params"] = [NgnbParams(g, args.k, args.q) for g in args.gammas]
        o["ylimit"] = args.ylimit
    elif cmd == "converge":
        o.update(gamma=args.gamma, lam=args.lam, ks=args.ks)
    elif cmd == "fit":
        o["input"] = args.input
    return cfg


def run(cfg: RunConfig, stdout: TextIO) -> None:
    buf = io.StringIO()
    COMMANDS[cfg.command](cfg, buf)
    if cfg.output_path is None:
        stdout.write(buf.getvalue())
    else:
        with open(cfg.output_path, "w", newline="") as fh:
            fh.write(buf.getvalue())


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        run(make_config(args), stdout)
    except NumericalError as exc:
        print(f"ngnb: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except (UsageError, NgnbError, DomainError, ValueError) as exc:
        print(f"ngnb: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ngnb: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
