"""
Command-line interface.

    cran-hetnet-game solve --scenario scenarios/desk.scenario --seed 3 --concept che
    cran-hetnet-game sweep sweeps/n_rrh.sweep --out n_rrh.csv --workers 4
    cran-hetnet-game verify --suite waterfill --suite cu_grid

Exit codes: 0 success, 1 invalid input, 2 solver failure (or a non-converged
NE under `solve --strict`, or a failed oracle suite under `verify`).
"""

import argparse
import json
import logging
import sys
from typing import Optional

import pandas as pd

from .channel import sample_channels
from .constants import CONCEPT_ALIASES, DESK_REALIZATIONS, ENCODING, NE
from .equilibrium import make_solver
from .exceptions import (
    EquilibriumError,
    ScenarioError,
    ScenarioFileNotFoundError,
    ScenarioParseError,
    SolverConvergenceError,
    SweepError,
)
from .experiments import cell_seeds, emit_csv, load_sweep_spec, run_sweep
from .oracles import ALL_SUITES, run_oracles
from .scenario import desk_scenario, load_scenario, sample_deployment

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_SOLVER_FAILURE = 2

INPUT_ERRORS = (
    ScenarioError,
    ScenarioParseError,
    ScenarioFileNotFoundError,
    SweepError,
    ValueError,
)
SOLVER_ERRORS = (EquilibriumError, SolverConvergenceError)


def _positive_int(raw: str) -> int:
    value = int(raw)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {raw}")
    return value


def _non_negative_int(raw: str) -> int:
    value = int(raw)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {raw}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cran-hetnet-game",
        description="Downlink power allocation game between a CRAN and a macro/pico/femto HetNet",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="INFO logging (-vv for DEBUG)"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="Solve one scenario and seed, print per-type rates")
    solve.add_argument("--scenario", help="Scenario file (default: desk-scale profile)")
    solve.add_argument("--seed", type=_non_negative_int, default=0, help="Base seed")
    solve.add_argument(
        "--concept",
        choices=sorted(CONCEPT_ALIASES),
        default="ne",
        help="Solution concept",
    )
    solve.add_argument("--out", help="Write the full result as JSON")
    solve.add_argument("--tol", type=float, help="NE stopping tolerance (fraction of P_max)")
    solve.add_argument("--tau", type=float, help="CH Poisson rate (default: scenario ch_tau)")
    solve.add_argument(
        "--strict", action="store_true", help="Exit 2 if the NE dynamics do not converge"
    )

    sweep = commands.add_parser("sweep", help="Run a sweep spec file and write CSV")
    sweep.add_argument("spec", help="Sweep spec file")
    sweep.add_argument("--out", required=True, help="Output CSV path")
    sweep.add_argument("--seed", type=_non_negative_int, help="Override the spec's base seed")
    sweep.add_argument(
        "--realizations", type=_positive_int, help="Override the spec's realization count"
    )
    sweep.add_argument("--tol", type=float, help="NE stopping tolerance (fraction of P_max)")
    sweep.add_argument("--tau", type=float, help="CH Poisson rate")
    sweep.add_argument("--workers", type=_positive_int, default=1, help="Worker processes")

    verify = commands.add_parser("verify", help="Run the oracle suites")
    verify.add_argument(
        "--suite",
        action="append",
        choices=ALL_SUITES,
        help="Suite to run (repeatable; default: solver and certificate suites)",
    )
    verify.add_argument("--seed", type=_non_negative_int, default=0, help="Base seed")
    verify.add_argument(
        "--realizations",
        type=_positive_int,
        default=DESK_REALIZATIONS,
        help="Desk-scale seeds for certificate and sweep suites",
    )
    verify.add_argument("--workers", type=_positive_int, default=1, help="Worker processes")
    verify.add_argument("--out", help="Write the suite outcomes as CSV")
    return parser


def _dynamics(args: argparse.Namespace) -> dict:
    return {"tol_outer": args.tol} if args.tol is not None else {}


def cmd_solve(args: argparse.Namespace) -> int:
    s = load_scenario(args.scenario) if args.scenario else desk_scenario()
    deployment_seed, channel_seed = cell_seeds(args.seed, 0, 0)
    d = sample_deployment(s, deployment_seed)
    c = sample_channels(d, s, channel_seed)

    solver = make_solver(args.concept, tau=args.tau, **_dynamics(args))
    result = solver.solve(s, d, c)

    rates = pd.Series(result.per_type_rates, name="mean_rate_bps")
    rates["Total"] = result.total_rate
    print(f"{result.concept} (converged={result.converged}, iterations={result.iterations})")
    print(rates.to_string())

    if args.out:
        try:
            with open(args.out, "w", encoding=ENCODING) as f:
                json.dump(result.to_dict(d), f, indent=2)
        except OSError as e:
            raise SweepError(f"Failed to write {args.out}: {e}")
        logger.info(f"Wrote result to {args.out}")

    if args.strict and result.concept == NE and not result.converged:
        logger.error("NE dynamics did not converge")
        return EXIT_SOLVER_FAILURE
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = load_sweep_spec(args.spec)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.realizations is not None:
        overrides["n_realizations"] = args.realizations
    if overrides:
        spec = spec.model_copy(update=overrides)

    result = run_sweep(spec, tau=args.tau, workers=args.workers, **_dynamics(args))
    emit_csv(result, args.out)
    for key, count in sorted(result.failures.items()):
        print(f"skipped {count} realization(s) of {key}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    checks = run_oracles(
        args.suite, n_seeds=args.realizations, seed=args.seed, workers=args.workers
    )
    table = pd.DataFrame([check.model_dump() for check in checks])
    columns = ["name", "passed", "cases", "failures", "worst", "threshold", "seconds"]
    print(table[columns].to_string(index=False))
    for check in checks:
        if check.detail:
            print(f"{check.name}: {check.detail}")

    if args.out:
        try:
            table.to_csv(args.out, index=False, encoding=ENCODING)
        except OSError as e:
            raise SweepError(f"Failed to write {args.out}: {e}")
    return EXIT_OK if all(check.passed for check in checks) else EXIT_SOLVER_FAILURE


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return COMMANDS[args.command](args)
    except SOLVER_ERRORS as e:
        logger.error(str(e))
        return EXIT_SOLVER_FAILURE
    except INPUT_ERRORS as e:
        logger.error(str(e))
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
