"""Command line entry point: cell, macro, reconstruct, run, verify."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ._cg import ConvergenceError
from .pipeline import ConfigError, load_config, run_pipeline

STAGES = {
    "cell": ("cell",),
    "macro": ("cell", "macro"),
    "reconstruct": ("cell", "macro", "averages"),
    "run": ("cell", "macro", "averages"),
}


def _parser():
    ap = argparse.ArgumentParser(prog="thinbrink", description="Homogenized thin-film Darcy-Brinkman flow.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("cell", "solve the cell problem and write tensor.json"),
                        ("macro", "cell problem plus macro pressure and average velocity"),
                        ("reconstruct", "macro solve plus averaged temperature and profile slices"),
                        ("run", "full pipeline")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output directory (default: output_dir from the config)")
        p.add_argument("--threads", type=int, default=1, help="workers for independent cell solves")
    p = sub.add_parser("verify", help="run oracle comparison suites")
    p.add_argument("--suite", default="all", help="all, quick, or comma-separated suite names")
    p.add_argument("--out", help="write the CSV table here instead of stdout")
    p.add_argument("--threads", type=int, default=1, help="accepted for symmetry; suites run serially")
    return ap


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "verify":
        from .verify import resolve, table_csv, verify

        try:
            resolve(args.suite)
        except ValueError as err:
            print(err, file=sys.stderr)
            return 2
        rows = verify(args.suite, log=lambda line: print(line, file=sys.stderr))
        table = table_csv(rows)
        if args.out:
            Path(args.out).write_text(table)
        else:
            sys.stdout.write(table)
        return 0 if all(r.passed for r in rows) else 1
    try:
        cfg = load_config(args.config)
    except ConfigError as err:
        for path, msg in err.errors:
            print(f"config error at {path or '<root>'}: {msg}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"cannot read config: {err}", file=sys.stderr)
        return 2
    if args.threads < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return 2
    try:
        report = run_pipeline(cfg, args.out, stages=STAGES[args.command], threads=args.threads,
                              config_dir=Path(args.config).parent)
    except ConvergenceError as err:
        print(f"solver failed: {err} (residual {err.residual})", file=sys.stderr)
        return 1
    for f in report.files:
        print(f)
    return report.status


if __name__ == "__main__":
    sys.exit(main())
