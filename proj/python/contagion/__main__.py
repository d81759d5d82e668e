"""`python -m contagion`: scenario runner mirroring the native CLI."""

import argparse
import sys

from . import run_scenario


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="contagion",
        description="Dynamic contagion reinsurance scenario runner",
    )
    parser.add_argument(
        "command",
        choices=["simulate", "phi", "optimize", "compare", "check"],
    )
    parser.add_argument("--config", required=True, help="scenario config file")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument(
        "--workers", type=int, default=0, help="0 = machine parallelism"
    )
    parser.add_argument("--seed", type=int, default=None, help="master seed override")
    args = parser.parse_args(argv)
    return run_scenario(args.command, args.config, args.out, args.workers, args.seed)


if __name__ == "__main__":
    sys.exit(main())
