"""Command-line front end: ``algdist <experiment> [options]``.

Runs one verification suite, prints (or writes) its JSON report, and exits
0 exactly when every assertion in the suite passed and the run completed
within its budgets.
"""

from __future__ import annotations

import argparse
import sys

from .config import load_config
from .experiments import EXPERIMENT_NAMES, default_config, run_experiment
from .report import dump_json, records_to_csv, write_report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="algdist",
        description="Verification harness for algebraic-distance and "
                    "derivated-distance inequalities on cycles in complex "
                    "projective space.")
    sub = parser.add_subparsers(dest="experiment", required=True,
                                metavar="experiment")
    for name in EXPERIMENT_NAMES:
        p = sub.add_parser(name, help=f"run the {name} suite")
        p.add_argument("--config", metavar="PATH",
                       help="JSON config file (defaults are per experiment; "
                            "--seed/--trials still override)")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (default 0)")
        p.add_argument("--trials", type=int, default=None,
                       help="instances per cell / total draws")
        p.add_argument("--out", metavar="PATH",
                       help="write the JSON report here instead of stdout")
        p.add_argument("--csv", metavar="PATH",
                       help="also write the flattened records as CSV")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker processes (reports are byte-identical "
                            "at any value)")
        p.add_argument("--no-timing", action="store_true",
                       help="omit the timing block, making the report bytes "
                            "a pure function of the config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            config = load_config(args.config, experiment=args.experiment)
            config = config.override(seed=args.seed, trials=args.trials)
        else:
            config = default_config(args.experiment, seed=args.seed,
                                    trials=args.trials)
        report = run_experiment(config, jobs=max(1, args.jobs),
                                with_timing=not args.no_timing)
    except (ValueError, OSError) as exc:
        print(f"algdist: error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        write_report(report, args.out)
    else:
        sys.stdout.write(dump_json(report))
    if args.csv:
        records_to_csv(report["records"], args.csv)
    ok = bool(report["aggregate"].get("pass")) and report["status"] == "complete"
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
