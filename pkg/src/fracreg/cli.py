"""Command line experiment runner.

Exit status is 0 when every check passes, 1 when any check fails and 2 for
configuration or usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import os
import sys
import tempfile
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from fracreg import config as cfgmod
from fracreg.caputo import (
    SampledFunction,
    TimeGrid,
    caputo_quadrature,
    catalog_function,
    l1_operator,
    l2_operator,
)
from fracreg.exactsol import EigenMode, ExactProblem, exact_dt, exact_dtt, exact_value
from fracreg.fdsolver import SpaceGrid, convergence_study, solve
from fracreg.regdiag import diagnose
from fracreg.repro import ALIASES, SCENARIOS, run_scenario
from fracreg.specialfn import (
    DomainError,
    FractionalOrder,
    NonConvergenceError,
    SeriesEvalConfig,
    gamma,
    mittag_leffler,
)

logger = logging.getLogger("fracreg")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class UsageError(Exception):
    pass


# {{{ output


def fmt(value: float) -> str:
    """17 significant digits, enough to round-trip a double."""
    return "" if value is None or (isinstance(value, float) and math.isnan(value)) \
        else f"{value:.16e}"


def write_atomic(path: Path, text: str) -> None:
    """Write *text* to a temporary file next to *path*, then rename it."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        write_atomic(path, text)
        logger.info("wrote %s", path)


def _output_path(value: str | None) -> Path | None:
    return None if value is None else cfgmod.resolve_output(value)


# }}}


# {{{ subcommands


def cmd_mlf(args: argparse.Namespace) -> int:
    cfg = SeriesEvalConfig(args.abs_tol, args.max_terms, args.arg_bound)
    rows = [(z, mittag_leffler(args.alpha, z, cfg)) for z in args.z]
    if len(rows) == 1 and args.output is None:
        print(fmt(rows[0][1]))
    else:
        emit(csv_text(["z", "E"], rows), _output_path(args.output))
    return EXIT_OK


def _analytic_caputo(name: str, delta: FractionalOrder, t: float) -> float:
    power = {"t2": 2.0, "t3": 3.0, "tdelta": delta.delta}.get(name)
    if power is None:
        return math.nan
    return gamma(power + 1.0) / gamma(power + 1.0 - delta.delta) * t ** (power - delta.delta)


def cmd_caputo(args: argparse.Namespace) -> int:
    delta = FractionalOrder(args.delta)
    g = catalog_function(args.function, delta)
    dg = g.derivatives[delta.ceiling - 1]
    grading = args.grading if delta.ceiling == 1 else 1.0

    rows = []
    for t in args.t:
        quad = caputo_quadrature(dg, delta, t, args.tol)
        grid = TimeGrid(t, args.M, grading)
        f = SampledFunction.from_callable(grid, g.value)
        if delta.ceiling == 1:
            discrete = l1_operator(f, delta).values[-1]
        else:
            phi1 = float(np.asarray(g.derivatives[0](np.array([0.0])))[0])
            discrete = l2_operator(f, delta, phi1).values[-1]
        rows.append((t, quad, discrete, _analytic_caputo(args.function, delta, t)))

    emit(csv_text(["t", "quadrature", "discrete", "analytic"], rows), _output_path(args.output))
    return EXIT_OK


def _parse_modes(text: str) -> tuple[EigenMode, ...]:
    modes = []
    for item in text.split(","):
        k, _, c = item.partition(":")
        try:
            modes.append(EigenMode(int(k), float(c) if c else 1.0))
        except ValueError as exc:
            raise UsageError(f"--modes: cannot parse {item!r} (expected k[:coefficient])") from exc
    return tuple(modes)


def cmd_exact(args: argparse.Namespace) -> int:
    p = ExactProblem(FractionalOrder(args.delta), _parse_modes(args.modes), args.T)
    x = np.linspace(0.0, math.pi, args.nx + 1)
    t = np.logspace(math.log10(args.t_min), math.log10(args.T), args.nt)

    header = ["x", "t", "v", "v_t"] + (["v_tt"] if p.delta.ceiling == 2 else [])
    X, Tm = np.meshgrid(x, t)
    cols = [X.ravel(), Tm.ravel(), exact_value(p, X, Tm).ravel(), exact_dt(p, X, Tm).ravel()]
    if p.delta.ceiling == 2:
        cols.append(exact_dtt(p, X, Tm).ravel())

    emit(csv_text(header, zip(*cols)), _output_path(args.output))
    return EXIT_OK


def _load(args: argparse.Namespace, subcommand: str) -> cfgmod.RunConfig:
    return cfgmod.load_config(args.config, subcommand)


def _require(run: cfgmod.RunConfig, *keys: str) -> None:
    missing = [k for k in keys if k not in run.numerics]
    if missing:
        raise cfgmod.ConfigError(f"{run.source}: [numerics] missing keys {missing}")


def cmd_solve(args: argparse.Namespace) -> int:
    run = _load(args, "solve")
    _require(run, "N", "M")
    spec = run.problem.spec
    space = SpaceGrid(spec.a, spec.b, run.numerics["N"])
    time = TimeGrid(spec.T, run.numerics["M"], run.numerics.get("grading", 1.0))
    sol = solve(spec, space, time)

    if run.format == "table":
        lines = [f"{'t':>24} {'max |u|':>24}"]
        lines += [f"{fmt(t):>24} {fmt(np.max(np.abs(u))):>24}"
                  for t, u in zip(time.nodes, sol.values)]
        emit("\n".join(lines) + "\n", run.output)
    else:
        rows = ((t, x, u) for t, row in zip(time.nodes, sol.values)
                for x, u in zip(space.nodes, row))
        emit(csv_text(["t", "x", "u"], rows), run.output)
    return EXIT_OK


def cmd_converge(args: argparse.Namespace) -> int:
    run = _load(args, "converge")
    _require(run, "N", "M_list")
    P = run.problem
    space = SpaceGrid(P.spec.a, P.spec.b, run.numerics["N"])
    report = convergence_study(
        P.spec, space, run.numerics["M_list"], run.numerics.get("grading", 1.0), exact=P.exact
    )

    if run.format == "table":
        emit(report.table() + "\n", run.output)
    else:
        rows = zip(report.M, report.dt, report.errors, report.errors_final)
        text = csv_text(["M", "dt", "max_error", "error_at_T"],
                        ((str(M), dt, e, ef) for M, dt, e, ef in rows))
        emit(text, run.output)
    print(f"fitted order {report.order:.4f} (error at T: {report.order_final:.4f})")
    return EXIT_OK


def cmd_diagnose(args: argparse.Namespace) -> int:
    run = _load(args, "diagnose")
    P = run.problem
    space = SpaceGrid(P.spec.a, P.spec.b, run.numerics.get("N", 256))
    report = diagnose(P.spec, space, exact=P.exact_problem, M=run.numerics.get("M", 512))

    print(report.summary())
    if run.output is not None:
        stem = run.output.with_suffix("")
        if report.forced_phi0 is not None:
            emit(csv_text(["x", "forced_phi0"], zip(space.nodes, report.forced_phi0)),
                 Path(f"{stem}_forced_phi0.csv"))
        if report.fit_samples is not None:
            emit(csv_text(["t", "abs_derivative"], report.fit_samples),
                 Path(f"{stem}_fit_samples.csv"))
        emit(report.summary() + "\n", Path(f"{stem}_report.txt"))
    return EXIT_OK


def cmd_repro(args: argparse.Namespace) -> int:
    checks = run_scenario(args.scenario)
    for check in checks:
        print(check.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracreg", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("mlf", help="evaluate the Mittag-Leffler function")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--z", type=float, nargs="+", required=True)
    p.add_argument("--abs-tol", type=float, default=1.0e-16)
    p.add_argument("--max-terms", type=int, default=1000)
    p.add_argument("--arg-bound", type=float, default=50.0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mlf)

    p = sub.add_parser("caputo", help="Caputo derivative of a catalog function")
    p.add_argument("--function", required=True,
                   choices=["t2", "t3", "sin", "expm1mt", "tdelta"])
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--t", type=float, nargs="+", required=True)
    p.add_argument("--M", type=int, default=256)
    p.add_argument("--grading", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1.0e-10)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_caputo)

    p = sub.add_parser("exact", help="tabulate the exact solution near t = 0")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--modes", default="1", help="comma separated k[:coefficient]")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--nx", type=int, default=32)
    p.add_argument("--nt", type=int, default=61)
    p.add_argument("--t-min", type=float, default=1.0e-6)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_exact)

    for name, func, text in [
        ("solve", cmd_solve, "solve a configured problem"),
        ("converge", cmd_converge, "temporal convergence study"),
        ("diagnose", cmd_diagnose, "regularity diagnostics of a configured problem"),
    ]:
        p = sub.add_parser(name, help=text)
        p.add_argument("config")
        p.set_defaults(func=func)

    p = sub.add_parser("repro", help="run a scripted reproduction")
    p.add_argument("scenario", choices=[*SCENARIOS, *ALIASES, "all"])
    p.set_defaults(func=cmd_repro)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK

    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (cfgmod.ConfigError, UsageError, DomainError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
