"""Command-line interface.

Subcommands: ``screen`` (marginal), ``iterate`` (iterative),
``stability`` (stability screening), ``simulate`` (Monte Carlo
harness), and ``oracle-check`` (pairwise-definition equality suite).
Results go to --output or stdout; diagnostics go to stderr.  Exit codes:
0 success, 1 validation/usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from .data import validate_dataset
from .errors import MdrError, ValidationError
from .index import mdr_index_all, mdr_index_bruteforce, standardize
from .io import FORMATS, load_csv, render_result, write_result
from .iterative import default_stage_plan, mdr_is
from .ranking import auto_budget, select_threshold, select_top
from .simulation import (
    CENSOR_SCALE_INTERPRETATIONS,
    MODELS,
    SimulationSpec,
    gen_covariates,
    gen_response,
    run_experiment,
)
from .slicing import partition_slices
from .stability import StabilityConfig, mdr_ss

THREADS_ENV_VAR = "MDRSCREEN_THREADS"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the CLI contract wants 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _default_threads():
    raw = os.environ.get(THREADS_ENV_VAR)
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def _add_io_flags(p):
    p.add_argument("--output", help="write the result here (default: stdout)")
    p.add_argument("--format", choices=FORMATS, default="table")


def _add_data_flags(p):
    p.add_argument("--input", required=True, help="CSV file with header row")
    p.add_argument("--time-col", required=True, help="observed-time column name")
    p.add_argument("--status-col", required=True, help="0/1 censoring-status column name")
    p.add_argument("--id-col", help="optional identifier column to ignore")


def _add_slice_flags(p):
    p.add_argument("--slices-event", type=int, help="slice count for the event group")
    p.add_argument("--slices-censored", type=int, help="slice count for the censored group")


def _add_threads_flag(p):
    p.add_argument("--threads", type=int, default=_default_threads(),
                   help="worker cap for the compute modules")


def build_parser():
    parser = _Parser(prog="mdrscreen", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_screen = sub.add_parser("screen", help="marginal screening on a CSV")
    _add_data_flags(p_screen)
    _add_slice_flags(p_screen)
    rule = p_screen.add_mutually_exclusive_group()
    rule.add_argument("--top", type=int, help="keep exactly this many covariates (default: floor(n/ln n))")
    rule.add_argument("--threshold", type=float, help="keep covariates scoring at least this")
    _add_threads_flag(p_screen)
    _add_io_flags(p_screen)

    p_iter = sub.add_parser("iterate", help="iterative screening on a CSV")
    _add_data_flags(p_iter)
    _add_slice_flags(p_iter)
    p_iter.add_argument("--top", type=int, help="total budget (default: floor(n/ln n))")
    p_iter.add_argument(
        "--stages",
        default="auto",
        help='comma-separated per-stage sizes, e.g. "19,18", or "auto" for two equal stages',
    )
    _add_threads_flag(p_iter)
    _add_io_flags(p_iter)

    p_stab = sub.add_parser("stability", help="stability screening on a CSV")
    _add_data_flags(p_stab)
    _add_slice_flags(p_stab)
    p_stab.add_argument("--stability-B", dest="stability_b", type=int, default=100)
    p_stab.add_argument("--stability-ns", dest="stability_ns", type=int, help="subsample size (default: floor(4n/5))")
    p_stab.add_argument("--pi0", type=float, default=0.3)
    p_stab.add_argument("--stages", default="auto", help='per-subsample stage sizes or "auto"')
    p_stab.add_argument("--seed", type=int, default=0)
    _add_threads_flag(p_stab)
    _add_io_flags(p_stab)

    p_sim = sub.add_parser("simulate", help="Monte Carlo selection-proportion experiment")
    p_sim.add_argument("--model", choices=MODELS, required=True)
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--p", type=int, required=True)
    p_sim.add_argument("--rho", type=float, default=0.0)
    p_sim.add_argument("--reps", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--method", choices=("mdr-sis", "mdr-is", "mdr-ss"), default="mdr-sis")
    p_sim.add_argument("--top", type=int, help="rank budget (default: floor(n/ln n))")
    p_sim.add_argument("--stages", help='stage sizes for mdr-is/mdr-ss, e.g. "19,18"')
    _add_slice_flags(p_sim)
    p_sim.add_argument("--stability-B", dest="stability_b", type=int, default=100)
    p_sim.add_argument("--stability-ns", dest="stability_ns", type=int)
    p_sim.add_argument("--pi0", type=float, default=0.3)
    p_sim.add_argument("--censor-scale", choices=CENSOR_SCALE_INTERPRETATIONS, default="variance")
    _add_threads_flag(p_sim)
    p_sim.add_argument("--timing", action="store_true", help="include wall-clock in the output")
    _add_io_flags(p_sim)

    p_oracle = sub.add_parser(
        "oracle-check", help="compare the index against its pairwise definition"
    )
    p_oracle.add_argument("--input", help="CSV file; omit to use generated data")
    p_oracle.add_argument("--time-col", help="observed-time column (with --input)")
    p_oracle.add_argument("--status-col", help="status column (with --input)")
    p_oracle.add_argument("--id-col")
    _add_slice_flags(p_oracle)
    p_oracle.add_argument("--n", type=int, default=80, help="rows of generated data")
    p_oracle.add_argument("--p", type=int, default=5, help="columns of generated data")
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--tol", type=float, default=1e-8)

    return parser


def _usage_error(message):
    from .errors import Violation

    return ValidationError([Violation("bad_argument", message)])


def _parse_stages(raw, budget):
    if raw is None:
        return None
    if raw == "auto":
        return default_stage_plan(budget)
    try:
        return tuple(int(s) for s in raw.split(","))
    except ValueError:
        raise _usage_error(f'bad --stages value {raw!r}; expected e.g. "19,18"') from None


def _emit(result, args, names=None, include_timing=False):
    if args.output:
        write_result(result, args.output, format=args.format, names=names, include_timing=include_timing)
        print(f"wrote {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(
            render_result(result, format=args.format, names=names, include_timing=include_timing)
        )


def _load(args):
    return load_csv(args.input, args.time_col, args.status_col, args.id_col)


def _run_echo(args):
    echo = {
        "input": args.input,
        "time_col": args.time_col,
        "status_col": args.status_col,
        "slices_event": args.slices_event,
        "slices_censored": args.slices_censored,
    }
    if args.id_col:
        echo["id_col"] = args.id_col
    return echo


def _cmd_screen(args):
    data, names = _load(args)
    with threadpool_limits(limits=args.threads):
        partition = partition_slices(data, args.slices_event, args.slices_censored)
        indices = mdr_index_all(data, partition)
        if args.threshold is not None:
            result = select_threshold(indices, args.threshold, config_echo=_run_echo(args))
        else:
            result = select_top(
                indices,
                args.top if args.top is not None else auto_budget(data.n, data.p),
                config_echo=_run_echo(args),
            )
    _emit(result, args, names)
    return 0


def _cmd_iterate(args):
    data, names = _load(args)
    with threadpool_limits(limits=args.threads):
        partition = partition_slices(data, args.slices_event, args.slices_censored)
        budget = args.top if args.top is not None else auto_budget(data.n, data.p)
        sizes = _parse_stages(args.stages, budget)
        result = mdr_is(data, partition, sizes, config_echo=_run_echo(args))
    _emit(result, args, names)
    return 0


def _cmd_stability(args):
    data, names = _load(args)
    stages = None if args.stages == "auto" else _parse_stages(args.stages, 0)
    config = StabilityConfig(
        b=args.stability_b,
        n_s=args.stability_ns,
        pi0=args.pi0,
        stage_sizes=stages,
        seed=args.seed,
        slices_event=args.slices_event,
        slices_censored=args.slices_censored,
    )
    result = mdr_ss(data, config, n_jobs=args.threads)
    result.config_echo.update(_run_echo(args))
    _emit(result, args, names)
    return 0


def _cmd_simulate(args):
    spec = SimulationSpec(
        model=args.model,
        n=args.n,
        p=args.p,
        rho=args.rho,
        replications=args.reps,
        seed=args.seed,
        method=args.method,
        top=args.top,
        stage_sizes=None if args.stages in (None, "auto") else _parse_stages(args.stages, 0),
        slices_event=args.slices_event,
        slices_censored=args.slices_censored,
        stability_b=args.stability_b,
        stability_ns=args.stability_ns,
        pi0=args.pi0,
        censor_scale=args.censor_scale,
    )
    report = run_experiment(spec, n_jobs=args.threads)
    print(
        f"completed {report.replications_completed} replications, "
        f"mean {report.mean_rep_seconds:.3f}s each",
        file=sys.stderr,
    )
    _emit(report, args, include_timing=args.timing)
    return 0


def _cmd_oracle_check(args):
    if args.input:
        if not (args.time_col and args.status_col):
            raise _usage_error("--input requires --time-col and --status-col")
        data, _ = _load(args)
    else:
        rng = np.random.default_rng(args.seed)
        x = rng.standard_normal((args.n, args.p))
        times = rng.exponential(1.0, size=args.n)
        status = (rng.random(args.n) < 0.7).astype(int)
        status[:1] = 1
        status[1:2] = 0
        data = validate_dataset(x, times, status)
    partition = partition_slices(data, args.slices_event, args.slices_censored)
    fast = mdr_index_all(data, partition)
    worst = 0.0
    for k in range(data.p):
        if (k + 1) in fast.degenerate_ids:
            continue
        z = standardize(data.covariates[:, k])
        slow = mdr_index_bruteforce(z, partition)
        worst = max(worst, abs(slow - fast.values[k]))
    print(f"max |index - pairwise definition| over {data.p} covariates: {worst:.3e}")
    if worst <= args.tol:
        print(f"OK (tolerance {args.tol:g})")
        return 0
    print(f"FAIL (tolerance {args.tol:g})", file=sys.stderr)
    return 2


_COMMANDS = {
    "screen": _cmd_screen,
    "iterate": _cmd_iterate,
    "stability": _cmd_stability,
    "simulate": _cmd_simulate,
    "oracle-check": _cmd_oracle_check,
}


def cli_main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValidationError, ValueError) as exc:
        print(f"mdrscreen: validation error: {exc}", file=sys.stderr)
        return 1
    except MdrError as exc:
        print(f"mdrscreen: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"mdrscreen: io error: {exc}", file=sys.stderr)
        return 2


def main():
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
