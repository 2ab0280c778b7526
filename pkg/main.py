import argparse
import logging
import sys

from harness.sweep import DEFAULT_WORKERS
from observer.leso import DEFAULT_OMEGA_O
from operations import Operations

## Instantiate Logger
logger = logging.getLogger(__name__)


def build_parser():
    """
    Command line of the multi-observer ADRC harness
    """

    parser = argparse.ArgumentParser(prog="main.py", description="Parallel multi-ESO ADRC simulation harness")
    parser.add_argument("--output", help="directory for traces and reports (overrides ADRC_OUTPUT_DIR)")
    parser.add_argument("--long", action="store_true", help="write traces in long (t, variable, value) format")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a scenario file")
    run.add_argument("config", help="path to the YAML scenario")

    preset = commands.add_parser("preset", help="run a built in scenario")
    preset.add_argument("name", nargs="?", help="preset name")
    preset.add_argument("--list", action="store_true", help="list the available presets")
    preset.add_argument("--show", action="store_true", help="print the named preset as a scenario file")

    verify = commands.add_parser("verify", help="run the numerical verification suite")
    verify.add_argument("--omega-o", type=float, default=DEFAULT_OMEGA_O, help="observer bandwidth under test")
    verify.add_argument("--typo-gains", action="store_true", help="4th order observer with 6 omega_o^3 as third gain")

    sweep = commands.add_parser("sweep", help="rerun a scenario over the values of one field")
    sweep.add_argument("config", help="path to the YAML scenario")
    sweep.add_argument("--param", required=True, help="dotted field path, e.g. observers.0.omega_o")
    sweep.add_argument("--values", required=True, help="comma separated values")
    sweep.add_argument("--workers", type=int, default=DEFAULT_WORKERS, help="worker threads")

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(message)s")

    operations = Operations(output_dir=args.output, long=args.long)

    if args.command == "run":
        return operations.run_config(args.config)
    if args.command == "preset":
        if args.list or not args.name:
            return operations.list_presets()
        if args.show:
            return operations.show_preset(args.name)
        return operations.run_preset(args.name)
    if args.command == "verify":
        return operations.verify(omega_o=args.omega_o, typo_gains=args.typo_gains)
    return operations.sweep(args.config, args.param, args.values, args.workers)


if __name__ == "__main__":
    sys.exit(main())
