"""``codedmm`` command line: ``run`` an experiment config, ``summarize`` a CSV."""

from __future__ import annotations

import argparse
import sys

from .errors import CodedMMError
from .experiments import emit_csv, parse_config, read_csv, run_experiment, summarize_table, write_aggregate


def _overrides(args) -> dict[str, str]:
    out = {}
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise CodedMMError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    if args.seed is not None:
        out["seed"] = str(args.seed)
    if args.trials is not None:
        out["trials"] = str(args.trials)
    return out


def cmd_run(args) -> None:
    cfg = parse_config(args.config, _overrides(args))
    records = run_experiment(cfg)
    emit_csv(records, args.out)
    if args.aggregate:
        write_aggregate(records, args.aggregate)
    if not args.quiet:
        print(summarize_table(records), end="")


def cmd_summarize(args) -> None:
    records = read_csv(args.csv)
    if not records:
        raise CodedMMError(f"{args.csv}: no records")
    print(summarize_table(records), end="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="codedmm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment config and write per-trial CSV")
    run.add_argument("--config", required=True, help="key = value experiment file")
    run.add_argument("--seed", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--out", default="results.csv", help="CSV output path (default: results.csv)")
    run.add_argument("--aggregate", help="also write a gnuplot-friendly aggregate table here")
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")
    run.add_argument("-q", "--quiet", action="store_true", help="do not print the summary table")
    run.set_defaults(func=cmd_run)

    summ = sub.add_parser("summarize", help="print a Table-1-style grid from a results CSV")
    summ.add_argument("csv")
    summ.set_defaults(func=cmd_summarize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except CodedMMError as exc:
        print(f"codedmm: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"codedmm: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
