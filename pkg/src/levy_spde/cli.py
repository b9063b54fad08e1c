"""Command line entry point ``levy-spde``."""
import argparse
import sys

from .experiments import run_experiment, validate


def build_parser():
    parser = argparse.ArgumentParser(
        prog="levy-spde",
        description="Spectral-Galerkin SPDE experiments driven by cylindrical Levy noise.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="validate a config, run it and write CSV artifacts")
    run.add_argument("config")
    run.add_argument("--seed", type=int, default=None, help="override [experiment] seed")
    run.add_argument("--out", default=None, help="output directory (default ./out-<kind>)")
    run.add_argument("--threads", type=int, default=1)
    val = sub.add_parser("validate", help="parse a config and check its hypotheses")
    val.add_argument("config")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        code, msgs = validate(args.config)
    else:
        if args.threads < 1:
            print("config error: --threads must be >= 1", file=sys.stderr)
            return 2
        code, _, msgs = run_experiment(args.config, args.seed, args.out, args.threads)
    stream = sys.stderr if code == 2 else sys.stdout
    for line in msgs:
        print(line, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
