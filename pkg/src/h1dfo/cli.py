"""Command-line front end: solve one problem, run a benchmark, build profiles."""

from __future__ import annotations

import argparse
import sys

from . import bench
from .problems import PROBLEM_NAMES, get_problem
from .solver import SOLVER_NAMES, SolverConfig, minimize, sigma_rule_for

_USAGE_ERROR = 2
_RUNTIME_ERROR = 1


def _add_common(parser, multi: bool):
    parser.add_argument("--rhobeg", type=float, default=0.5, help="initial trust radius")
    parser.add_argument("--rhoend", type=float, default=1e-6, help="final trust radius")
    parser.add_argument("--maxfun", type=int, default=1000, help="evaluation budget")
    parser.add_argument(
        "--npt", type=int, default=None, help="interpolation points (default 2n+1)"
    )
    parser.add_argument("--M", type=float, default=10.0, help="geometric sigma rule factor")
    parser.add_argument("--seed", type=int, default=0, help="base seed")
    if multi:
        parser.add_argument("--problems", required=True, help="comma-separated problem names")
        parser.add_argument("--dims", required=True, help="comma-separated dimensions")
        parser.add_argument(
            "--solvers",
            default=",".join(SOLVER_NAMES),
            help=f"comma-separated solver names (default {','.join(SOLVER_NAMES)})",
        )
        parser.add_argument("--perms", type=int, default=10, help="permutations per instance")
    else:
        parser.add_argument("--problem", required=True, help="problem name")
        parser.add_argument("--n", type=int, required=True, help="dimension")
        parser.add_argument("--solver", default="esymbs", help="solver name")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="h1dfo",
        description="Derivative-free trust-region optimization on ball-seminorm models",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_solve = sub.add_parser("solve", help="minimize one test problem")
    _add_common(p_solve, multi=False)

    p_bench = sub.add_parser("bench", help="run the permutation benchmark, write records CSV")
    _add_common(p_bench, multi=True)
    p_bench.add_argument("--out", required=True, help="output records CSV path")

    p_prof = sub.add_parser("profile", help="build performance profiles from a records CSV")
    p_prof.add_argument("--in", dest="infile", required=True, help="input records CSV")
    p_prof.add_argument("--metric", choices=("mean", "rstd"), default="mean")
    p_prof.add_argument("--out", required=True, help="output profile CSV path")
    p_prof.add_argument("--svg", default=None, help="optional SVG output path")
    return parser


def _check_names(names, known, kind: str):
    for name in names:
        if name not in known:
            raise _UsageError(f"unknown {kind} {name!r}; choose from {', '.join(known)}")


class _UsageError(Exception):
    pass


def _positive(value: float, flag: str):
    if not value > 0:
        raise _UsageError(f"{flag} must be positive, got {value}")


def _cmd_solve(args) -> int:
    _check_names([args.solver], SOLVER_NAMES, "solver")
    _check_names([args.problem.lower()], PROBLEM_NAMES, "problem")
    _positive(args.rhobeg, "--rhobeg")
    _positive(args.rhoend, "--rhoend")
    problem = get_problem(args.problem, args.n)
    config = SolverConfig(
        rhobeg=args.rhobeg,
        rhoend=args.rhoend,
        maxfun=args.maxfun,
        npt=args.npt,
        sigma_rule=sigma_rule_for(args.solver, args.M),
        seed=args.seed,
    )
    report = minimize(problem.objective, problem.start, config)
    shown = ",".join(format(v, ".6g") for v in report.best_point[:4])
    if report.best_point.size > 4:
        shown += ",..."
    print(
        f"problem={problem.name} n={problem.n} solver={args.solver} "
        f"status={report.status} nf={report.nf} fbest={report.best_value:.12e} "
        f"x_best=[{shown}]"
    )
    return 0


def _cmd_bench(args) -> int:
    solvers = [s.strip() for s in args.solvers.split(",") if s.strip()]
    problems = [p.strip().lower() for p in args.problems.split(",") if p.strip()]
    dims = [int(d) for d in args.dims.split(",") if d.strip()]
    _check_names(solvers, SOLVER_NAMES, "solver")
    _check_names(problems, PROBLEM_NAMES, "problem")
    _positive(args.rhobeg, "--rhobeg")
    _positive(args.rhoend, "--rhoend")
    if args.perms < 1:
        raise _UsageError("--perms must be >= 1")
    config = SolverConfig(
        rhobeg=args.rhobeg, rhoend=args.rhoend, maxfun=args.maxfun, npt=args.npt, seed=args.seed
    )
    records = bench.run_suite(
        solvers, problems, dims, args.perms, args.seed, config, m_factor=args.M
    )
    with open(args.out, "w") as fh:
        fh.write(bench.records_to_csv(records))
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_profile(args) -> int:
    try:
        with open(args.infile) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.infile}: {exc}", file=sys.stderr)
        return _RUNTIME_ERROR
    records = bench.records_from_csv(text)
    curves, _, _ = bench.profile_from_records(records, args.metric)
    with open(args.out, "w") as fh:
        fh.write(bench.profile_to_csv(curves))
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(bench.profile_svg(curves))
    print(f"wrote {len(curves)} profile curves to {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.subcommand == "solve":
            return _cmd_solve(args)
        if args.subcommand == "bench":
            return _cmd_bench(args)
        return _cmd_profile(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _RUNTIME_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
