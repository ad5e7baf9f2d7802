"""Command-line front end.

Usage::

    potex solve --problem dirichlet --coeffs h.json --r 2.0 --kmax 16 --out f.csv
    potex rates --problem neumann --extremal 0.5 --tmin 1e-3 --tmax 1e-1 --points 24 --out rates.json
    potex verify --kmax 16 --suite all
    potex extremal --alpha 0.5 --kmax 4096 --out h.json

Exit codes: 0 success, 1 failed verification check, 2 invalid
configuration, 3 inadmissible Robin coefficients, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, checks, formats, rates, solvers
from .exceptions import AdmissibilityError, DomainError, TruncationMismatchError, UnsupportedProblemError
from .operators import ProblemSpec
from .sphharm import SphericalSpectrum, make_grid

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_ADMISSIBILITY, EXIT_IO = 0, 1, 2, 3, 4


class ConfigError(Exception):
    pass


def _problem(args, k_max: int) -> ProblemSpec:
    if args.problem == "robin":
        if args.a is None or args.b is None:
            raise ConfigError("--problem robin needs both --a and --b")
        return ProblemSpec.robin(args.a, args.b, k_max)
    return ProblemSpec(args.problem, k_max)


def _load_h(path) -> SphericalSpectrum:
    try:
        return formats.read_spectrum(path)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _radii(args) -> list[float]:
    if args.r:
        radii = list(args.r)
    elif args.rmin is not None and args.rmax is not None:
        if not 1 < args.rmin < args.rmax:
            raise ConfigError("need 1 < --rmin < --rmax")
        radii = np.geomspace(args.rmin, args.rmax, args.points).tolist()
    else:
        raise ConfigError("give --r or both --rmin and --rmax")
    bad = [r for r in radii if not r > 1]
    if bad:
        raise ConfigError(f"radii must exceed 1, got {bad}")
    return radii


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _config_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def cmd_solve(args) -> int:
    if args.out is None:
        raise ConfigError("solve needs --out")
    if args.kmax is not None:
        _problem(args, args.kmax)
    radii = _radii(args)
    h = _load_h(args.coeffs)
    k_max = args.kmax if args.kmax is not None else h.k_max
    if h.k_max > k_max:
        raise ConfigError(f"coefficient file has degree {h.k_max} > --kmax {k_max}")
    spec = _problem(args, k_max)
    field = solvers.solve(spec, h.truncate(k_max))
    grid = make_grid(k_max)
    rows = [(solvers.eval_field(field, grid, r), r) for r in radii]
    formats.write_field(rows, args.out)
    return EXIT_OK


def cmd_rates(args) -> int:
    if (args.coeffs is None) == (args.extremal is None):
        raise ConfigError("give exactly one of --coeffs or --extremal")
    if not 0 < args.tmin < args.tmax:
        raise ConfigError(f"need 0 < --tmin < --tmax, got {args.tmin}, {args.tmax}")
    if args.problem == "robin":
        raise ConfigError("rate probes need a semigroup; use --problem dirichlet or neumann")
    if args.extremal is not None:
        h = rates.extremal_h(args.extremal, args.kmax or 4096)
    else:
        h = _load_h(args.coeffs)
        if args.kmax is not None:
            h = h.truncate(args.kmax)
    grid = rates.rate_grid(args.tmin, args.tmax, args.points)
    bat = rates.equivalence_battery(_problem(args, h.k_max), h, grid)
    doc = {"tool": "potex", "version": __version__, "config": _config_echo(args), **bat.to_dict()}

    if args.out is None:
        if args.format == "csv":
            raise ConfigError("--format csv needs --out")
        _emit(_dump(doc), None)
        return EXIT_OK
    stem = Path(args.out)
    for which, rep in bat.reports.items():
        formats.write_rate(rep, stem.with_name(f"{stem.stem}.{which}.csv"))
    if args.format == "json":
        _emit(_dump(doc), args.out)
    return EXIT_OK


def _parse_tol(items) -> dict:
    tol = dict(checks.DEFAULT_TOLERANCES)
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or name not in tol:
            raise ConfigError(f"--tol expects NAME=VALUE with NAME in {sorted(tol)}, got {item!r}")
        try:
            tol[name] = float(value)
        except ValueError:
            raise ConfigError(f"--tol {name}: not a number: {value!r}") from None
    return tol


def cmd_verify(args) -> int:
    suites = [s.strip() for s in args.suite.split(",")]
    if suites == ["all"]:
        suites = list(checks.SUITES)
    unknown = [s for s in suites if s not in checks.SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {unknown}; choose from all, {', '.join(checks.SUITES)}")
    tol = _parse_tol(args.tol)
    try:
        seed = int(os.environ.get("POTEX_SEED", "0"))
    except ValueError:
        raise ConfigError("POTEX_SEED must be an integer") from None
    a = 1.0 if args.a is None else args.a
    b = -1.0 if args.b is None else args.b
    rng = np.random.default_rng(seed)

    results = {}
    for suite in suites:
        for c in checks.run_suite(suite, args.kmax, rng, tol, a, b):
            results[c.name] = c.to_dict()
    doc = {
        "tool": "potex",
        "version": __version__,
        "seed": seed,
        "config": _config_echo(args),
        "checks": results,
        "all_pass": all(c["pass"] for c in results.values()),
    }
    _emit(_dump(doc), args.out)
    return EXIT_OK if doc["all_pass"] else EXIT_FAILED


def cmd_extremal(args) -> int:
    h = rates.extremal_h(args.alpha, args.kmax)
    _emit(_dump(formats.spectrum_to_dict(h)), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="potex", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"potex {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def problem_flags(sp):
        sp.add_argument("--problem", choices=["dirichlet", "neumann", "robin"], required=True)
        sp.add_argument("--a", type=float, help="Robin coefficient of w")
        sp.add_argument("--b", type=float, help="Robin coefficient of dw/dr")

    s = sub.add_parser("solve", help="evaluate the exterior field on a grid at given radii")
    problem_flags(s)
    s.add_argument("--coeffs", required=True, help="boundary data spectrum (JSON)")
    s.add_argument("--kmax", type=int)
    s.add_argument("--r", type=float, nargs="+")
    s.add_argument("--rmin", type=float)
    s.add_argument("--rmax", type=float)
    s.add_argument("--points", type=int, default=8)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("rates", help="run the rate-equivalence battery")
    problem_flags(r)
    r.add_argument("--coeffs")
    r.add_argument("--extremal", type=float, metavar="ALPHA")
    r.add_argument("--kmax", type=int)
    r.add_argument("--tmin", type=float, default=1e-3)
    r.add_argument("--tmax", type=float, default=1e-1)
    r.add_argument("--points", type=int, default=24)
    r.add_argument("--format", choices=["csv", "json"], default="json")
    r.add_argument("--out", help="battery JSON path; per-probe CSVs are written beside it")
    r.set_defaults(func=cmd_rates)

    v = sub.add_parser("verify", help="run self-verification suites")
    v.add_argument("--suite", default="all", help="'all' or a comma-separated list of suites")
    v.add_argument("--kmax", type=int, default=16)
    v.add_argument("--a", type=float, help="Robin coefficient for robin-defect/harmonicity (default 1)")
    v.add_argument("--b", type=float, help="Robin coefficient for robin-defect/harmonicity (default -1)")
    v.add_argument("--tol", action="append", metavar="NAME=VALUE")
    v.add_argument("--format", choices=["json"], default="json")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("extremal", help="write the extremal boundary datum of rate alpha")
    e.add_argument("--alpha", type=float, required=True)
    e.add_argument("--kmax", type=int, default=4096)
    e.add_argument("--out")
    e.set_defaults(func=cmd_extremal)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "kmax", None) is not None and args.kmax < 0:
            raise ConfigError("--kmax must be non-negative")
        return args.func(args)
    except AdmissibilityError as exc:
        print(f"potex: inadmissible Robin coefficients: {exc}", file=sys.stderr)
        return EXIT_ADMISSIBILITY
    except OSError as exc:
        print(f"potex: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, DomainError, TruncationMismatchError, UnsupportedProblemError, ValueError) as exc:
        print(f"potex: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
