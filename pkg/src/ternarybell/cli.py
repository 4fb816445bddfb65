"""Command-line entry point: predict, bound, optimize, simulate, analyze.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import behavior as bh
from . import polytope, seesaw, simlab, stats
from .qcore import NoiseModel, canonical_behavior

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _sig9(obj):
    """Round every float to 9 significant digits, recursively."""
    if isinstance(obj, float):
        return float(f"{obj:.9g}")
    if isinstance(obj, dict):
        return {k: _sig9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sig9(v) for v in obj]
    return obj


def _dump(obj, out) -> None:
    out.write(json.dumps(_sig9(obj), indent=2) + "\n")


def cmd_predict(args, out) -> int:
    b = NoiseModel(args.visibility).apply(canonical_behavior())
    ia = bh.i_a(b)
    if args.json:
        _dump({"schema": "1", "visibility": args.visibility, "i_a": ia,
               "behavior": bh.to_json(b)}, out)
        return EXIT_OK
    out.write(f"I_a = {ia:.9g}\n")
    out.write("P(a,b|x,y), rows a, columns b:\n")
    for x in range(2):
        for y in range(2):
            out.write(f"  x={x} y={y}\n")
            for a in range(3):
                out.write("    " + "  ".join(f"{b.p[x, y, a, j]:.9f}" for j in range(3)) + "\n")
    return EXIT_OK


def cmd_bound(args, out) -> int:
    _dump(polytope.bound_certificate(), out)
    return EXIT_OK


def cmd_optimize(args, out) -> int:
    point = seesaw.optimize(seed=args.seed, restarts=args.restarts, max_iters=args.max_iters,
                            tol=args.tol, subspace=args.subspace, workers=args.workers)
    result = {"schema": "1", "seed": args.seed, "restarts": args.restarts,
              "best": point.to_json()}
    _dump(result, out)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    try:
        config = simlab.SimConfig(
            n_runs=args.runs, run_duration=args.duration, visibility=args.visibility,
            pair_rate=args.pair_rate, drift_sigma=args.drift_sigma,
            drift_correlation=args.drift_correlation, switch_coupling=args.switch_coupling,
            seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    records = simlab.simulate(config)
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            simlab.write_jsonl(records, fh)
    else:
        simlab.write_jsonl(records, out)
    return EXIT_OK


def cmd_analyze(args, out) -> int:
    if args.input and args.input != "-":
        with open(args.input) as fh:
            records = simlab.read_jsonl(fh)
    else:
        records = simlab.read_jsonl(sys.stdin)
    grouping = stats.group_runs(records)
    reports = [stats.analyze_sets(grouping.sets, "full", len(grouping.discarded), args.mle_fit)]
    if args.reduced:
        reports.append(stats.analyze_sets(stats.reduce_every_fifth(grouping.sets), "reduced",
                                          len(grouping.discarded), args.mle_fit))
    if args.json:
        _dump({"schema": "1", "reports": [r.to_json() for r in reports]}, out)
    else:
        out.write(stats.format_table(reports) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ternarybell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("predict", help="ideal quantum behavior and its I_a")
    p.add_argument("--visibility", type=float, default=1.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bound", help="exact binary and nonsignaling bounds (JSON certificate)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("optimize", help="see-saw search for the quantum maximum")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--subspace", type=int, choices=(2, 3), default=3)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_optimize)

    d = simlab.SimConfig()
    p = sub.add_parser("simulate", help="Monte Carlo run records as JSON lines")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=d.n_runs)
    p.add_argument("--duration", type=float, default=d.run_duration)
    p.add_argument("--visibility", type=float, default=d.visibility)
    p.add_argument("--pair-rate", type=float, default=d.pair_rate)
    p.add_argument("--drift-sigma", type=float, default=d.drift_sigma)
    p.add_argument("--drift-correlation", type=float, default=d.drift_correlation)
    p.add_argument("--switch-coupling", type=float, default=d.switch_coupling)
    p.add_argument("-o", "--output", help="file to write (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="evaluate JSON-lines run records")
    p.add_argument("input", nargs="?", help="JSON-lines file (default stdin)")
    p.add_argument("--reduced", action="store_true", help="also analyze every fifth complete set")
    p.add_argument("--mle-fit", action="store_true", help="nonsignaling maximum-likelihood fit")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--table", action="store_true", help="plain-text table (default)")
    p.set_defaults(func=cmd_analyze)
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().strip())
        if getattr(args, "restarts", 1) < 1:
            raise UsageError("--restarts must be >= 1")
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except (simlab.RecordError, OSError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_DATA


def main() -> None:
    sys.exit(run())
