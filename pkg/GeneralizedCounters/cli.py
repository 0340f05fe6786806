import argparse
import logging
import sys

from GeneralizedCounters.config import load_configs
from GeneralizedCounters.plots import plot, PLOT_KINDS
from GeneralizedCounters.train import run, sweep, oracle_table
from GeneralizedCounters.exceptions import ConfigurationError


def parse_args(argv=None) -> argparse.Namespace:

    parser = argparse.ArgumentParser(prog="generalized-counters",
                                     description="Seeded exploration experiments with E-values and generalized counters.")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="run every trial of one experiment and write the raw metrics CSV")
    run_parser.add_argument("--config", required=True, help="INI file; the first section is run unless --section is given")
    run_parser.add_argument("--section", default=None, help="experiment label to run")
    run_parser.add_argument("--out", required=True, help="raw metrics CSV")
    run_parser.add_argument("--workers", type=int, default=1)

    sweep_parser = commands.add_parser("sweep", help="run every section of a config file and aggregate across trials")
    sweep_parser.add_argument("--config", required=True)
    sweep_parser.add_argument("--out", required=True, help="output directory")
    sweep_parser.add_argument("--workers", type=int, default=1)

    oracle_parser = commands.add_parser("oracle", help="dump Q*, the optimal action flags and the optimal occupancy")
    oracle_parser.add_argument("--config", required=True)
    oracle_parser.add_argument("--section", default=None)
    oracle_parser.add_argument("--out", required=True)

    plot_parser = commands.add_parser("plot", help="render CSV tables as an SVG")
    plot_parser.add_argument("csv", nargs="+")
    plot_parser.add_argument("--kind", required=True, choices=PLOT_KINDS)
    plot_parser.add_argument("--out", required=True, help="SVG file")
    plot_parser.add_argument("--log-abscissa", action="store_true")

    return parser.parse_args(argv)


def _select(configs, section):

    if section is None:
        return configs[0]
    for config in configs:
        if config.label == section:
            return config
    raise ConfigurationError(f"No section '{section}', available: {', '.join(c.label for c in configs)}")


def main(argv=None) -> int:

    args = parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(asctime)s %(levelname)s %(message)s")

    try:
        if args.command == "run":
            config = _select(load_configs(args.config), args.section)
            result = run(config, args.out, args.workers)
            if result.failed_trials:
                logging.warning(f"Diverged trials: {result.failed_trials}")

        elif args.command == "sweep":
            sweep(load_configs(args.config), args.out, args.workers)

        elif args.command == "oracle":
            config = _select(load_configs(args.config), args.section)
            oracle_table(config.environment, config.env_params, args.out)

        elif args.command == "plot":
            plot(args.csv, args.kind, args.out, args.log_abscissa)

    except (ValueError, RuntimeError) as error:
        logging.error(f"{type(error).__name__}: {error}")
        return 1

    return 0


if __name__ == "__main__":
    sys.exit(main())
