"""Command-line front end: ``mlorder {eval,solve,estimate,verify,reproduce}``.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
Tables go to ``--out`` (or standard output) as CSV with LF line endings and
17 significant digits, or as JSON lines with ``--format jsonl``.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import math
import platform
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .errors import FitError, MLOrderError, SignalError
from .fdesolve import FdeClass, FdeProblem, solve
from .fracops import fde_residual
from .mlcore import MLParams, ml
from .orderest import indicator, indicator_series_analytic, indicator_series_sampled

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

FIGURES = {
    "fig1": ("thm2", {"mu": 1.0, "gamma": 0.7}, (0.35, 0.40, 0.45), "eta_beta{:.2f}"),
    "fig2": ("thm3", {"r": -2.0}, (1.2, 1.5, 1.7), "val_beta{:.1f}"),
}


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Grid and output settings shared by the subcommands."""

    subcommand: str
    t_min: float = 0.0
    t_max: float = 1.0
    n_points: int = 2
    spacing: str = "linear"
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self) -> None:
        if not self.t_min < self.t_max:
            raise UsageError(f"need tmin < tmax, got {self.t_min} >= {self.t_max}")
        if self.n_points < 2:
            raise UsageError(f"need at least 2 points, got {self.n_points}")
        if self.spacing == "log" and not self.t_min > 0:
            raise UsageError(f"log spacing needs tmin > 0, got {self.t_min}")

    def grid(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.t_min, self.t_max, self.n_points)
        return np.linspace(self.t_min, self.t_max, self.n_points)


# -- output -------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def render(header: Sequence[str], rows: Iterable[Sequence], fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "jsonl":
        for row in rows:
            rec = {k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in zip(header, row)}
            buf.write(json.dumps(rec, allow_nan=True) + "\n")
        return buf.getvalue()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def emit(text: str, out: str | None, stdout) -> None:
    if out is None:
        stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_meta(path: str | None, args: argparse.Namespace) -> None:
    if not path:
        return
    meta = {
        "version": __version__,
        "python": platform.python_version(),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "argv": {k: v for k, v in vars(args).items() if k != "func"},
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


# -- argument helpers ---------------------------------------------------------


def positive_step(text: str) -> float:
    """Accept ``0.01`` or ``1/256``."""
    try:
        value = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"step must be positive, got {text}")
    return value


def add_class_args(p: argparse.ArgumentParser, beta_required: bool = True) -> None:
    g = p.add_argument_group("equation")
    g.add_argument("--class", dest="fde_class", required=True, choices=[c.value for c in FdeClass])
    g.add_argument("--beta", type=float, required=beta_required)
    g.add_argument("--r", type=float, help="rate for thm3/thm4")
    g.add_argument("--mu", type=float, help="thm2")
    g.add_argument("--gamma", type=float, help="thm2")
    g.add_argument("--a1", type=float, help="thm1")
    g.add_argument("--a0", type=float, help="thm1")
    g.add_argument("--c1", type=float, default=1.0, help="thm1 (default 1)")
    g.add_argument("--c2", type=float, default=1.0, help="thm1 (default 1)")
    g.add_argument("--t0", type=float, default=None, help="thm1 lower terminal (default 1)")


_NEEDED = {"thm1": ("a1", "a0"), "thm2": ("mu", "gamma"), "thm3": ("r",), "thm4": ("r",)}


def problem_from_args(args: argparse.Namespace, beta: float | None = None) -> FdeProblem:
    kind = args.fde_class
    missing = [name for name in _NEEDED[kind] if getattr(args, name) is None]
    if missing:
        raise UsageError(f"class {kind} needs " + ", ".join("--" + m for m in missing))
    coeffs = {name: getattr(args, name) for name in _NEEDED[kind]}
    t0 = 0.0
    if kind == "thm1":
        coeffs.update(c1=args.c1, c2=args.c2)
        t0 = 1.0 if args.t0 is None else args.t0
    return FdeProblem(FdeClass(kind), args.beta if beta is None else beta, coeffs, t0)


def add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", dest="fmt", choices=("csv", "jsonl"), default="csv")
    p.add_argument("--meta", help="write run metadata as JSON to this path")


# -- subcommands --------------------------------------------------------------


def cmd_eval(args, stdout) -> int:
    p = MLParams(args.alpha, args.beta)
    rows = []
    for z in args.z:
        r = ml(p, z)
        rows.append((z, r.value, r.abs_error_estimate, r.regime.value))
    emit(render(("z", "value", "abs_error_estimate", "regime"), rows, args.fmt), args.out, stdout)
    return EXIT_OK


def cmd_solve(args, stdout) -> int:
    problem = problem_from_args(args)
    t_min = args.tmin
    if t_min is None:
        t_min = problem.t0 if problem.fde_class is FdeClass.RL_SEQUENTIAL_2TERM else 0.0
    cfg = RunConfig("solve", t_min, args.tmax, args.n_points, args.spacing, args.out, args.fmt)
    sol = solve(problem)
    ts = cfg.grid()
    rows = [(t, sol.u(float(t))) for t in ts]
    emit(render(("t", "value"), rows, args.fmt), args.out, stdout)
    return EXIT_OK


def read_samples(path: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["t", "value"]:
                raise SignalError(f"{path}: expected header 't,value', got {header!r}")
            ts, us = [], []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != 2:
                    raise SignalError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
                try:
                    ts.append(float(row[0]))
                    us.append(float(row[1]))
                except ValueError:
                    raise SignalError(f"{path}:{lineno}: non-numeric field in {row!r}")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    return np.array(ts), np.array(us)


def cmd_estimate(args, stdout) -> int:
    if args.input:
        ts, us = read_samples(args.input)
        # t = 0 rows (e.g. from `solve`) carry no indicator information
        keep = ts > 0
        series = indicator_series_sampled(ts[keep], us[keep], args.offset)
    else:
        if args.fde_class is None or args.beta is None:
            raise UsageError("give --input, or --class with --beta and its coefficients")
        problem = problem_from_args(args)
        cfg = RunConfig("estimate", args.tmin, args.tmax, args.n_points, "log", args.out, args.fmt)
        series = indicator_series_analytic(solve(problem), cfg.grid())
    summary = render(
        ("beta_hat", "decay_exponent", "residual"),
        [(series.beta_hat, series.decay_exponent, series.residual)],
        "csv" if args.out else args.fmt,
    )
    stdout.write(summary)
    if args.out:
        rows = [(t, e, e + series.offset) for t, e in zip(series.ts, series.etas)]
        emit(render(("t", "eta", "beta_estimate"), rows, args.fmt), args.out, stdout)
    return EXIT_OK


def cmd_verify(args, stdout) -> int:
    problem = problem_from_args(args, beta=args.test_beta)
    sol = solve(problem_from_args(args))
    report = fde_residual(problem, sol, args.h, args.tmax, t_start=args.t_start, sequential=args.sequential)
    rows = [(args.h, report.max_abs), (args.h / 2.0, report.max_abs_half)]
    text = render(("h", "max_abs_residual"), rows, args.fmt)
    emit(text, args.out, stdout)
    verdict = "converges" if report.converges else "does not converge"
    ratio = report.max_abs / report.max_abs_half if report.max_abs_half > 0 else math.inf
    print(f"# residual {verdict} (ratio {ratio:.3g}, required {1.5})", file=stdout if args.out is None else sys.stderr)
    return EXIT_OK if report.converges else EXIT_FAIL


def figure_table(name: str, ts: np.ndarray) -> tuple[list[str], list[list[float]]]:
    kind, coeffs, betas, col = FIGURES[name]
    header = ["t"] + [col.format(b) for b in betas]
    columns = []
    for b in betas:
        sol = solve(FdeProblem(FdeClass(kind), b, dict(coeffs)))
        # fig1 plots -t u'/u, fig2 plots 1 - t u'/u; both are eta + offset
        columns.append([indicator(sol.u(t), sol.du(t), t) + sol.offset for t in map(float, ts)])
    rows = [[t] + [c[i] for c in columns] for i, t in enumerate(ts)]
    return header, rows


def cmd_reproduce(args, stdout) -> int:
    cfg = RunConfig("reproduce", args.tmin, args.tmax, args.n_points, "log", args.out, args.fmt)
    header, rows = figure_table(args.figure, cfg.grid())
    emit(render(header, rows, args.fmt), args.out, stdout)
    return EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlorder", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("eval", help="evaluate E_{alpha,beta}(z)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--z", type=float, action="append", required=True, help="repeatable")
    add_output_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("solve", help="tabulate the closed-form solution u(t)")
    add_class_args(p)
    p.add_argument("--tmin", type=float, default=None, help="default 0 (thm1: t0)")
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--n-points", type=int, default=101)
    p.add_argument("--spacing", choices=("linear", "log"), default="linear")
    add_output_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("estimate", help="recover the order from -t u'/u")
    g = p.add_argument_group("equation")
    g.add_argument("--class", dest="fde_class", choices=[c.value for c in FdeClass])
    g.add_argument("--beta", type=float)
    for name in ("r", "mu", "gamma", "a1", "a0", "t0"):
        g.add_argument("--" + name, type=float)
    g.add_argument("--c1", type=float, default=1.0)
    g.add_argument("--c2", type=float, default=1.0)
    p.add_argument("--tmin", type=float, default=1e2)
    p.add_argument("--tmax", type=float, default=1e6)
    p.add_argument("--n-points", type=int, default=100)
    p.add_argument("--input", help="CSV with header t,value")
    p.add_argument("--offset", type=int, choices=(-1, 0, 1), default=0, help="class offset for --input")
    add_output_args(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", help="check the solution against a discretised operator")
    add_class_args(p)
    p.add_argument("--h", type=positive_step, default=1.0 / 512)
    p.add_argument("--tmax", type=float, default=4.0)
    p.add_argument("--t-start", type=float, default=None, help="start of the reported window (default tmax/8)")
    p.add_argument("--test-beta", type=float, default=None, help="order of the operator (negative control)")
    p.add_argument("--sequential", action="store_true", help="thm2: compose two order-beta derivatives")
    add_output_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reproduce", help="indicator curves of the two example figures")
    p.add_argument("figure", choices=sorted(FIGURES))
    p.add_argument("--tmin", type=float, default=0.1)
    p.add_argument("--tmax", type=float, default=1e4)
    p.add_argument("--n-points", type=int, default=400)
    add_output_args(p)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        code = args.func(args, stdout)
        write_meta(args.meta, args)
        return code
    except FitError as exc:
        print(f"mlorder {args.subcommand}: fit failed: {exc}", file=sys.stderr)
    except (UsageError, MLOrderError, ValueError, ArithmeticError, KeyError) as exc:
        print(f"mlorder {args.subcommand}: error: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"mlorder {args.subcommand}: I/O error: {exc}", file=sys.stderr)
    return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
