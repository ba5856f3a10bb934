# vertexlab/cli.py
"""
Command-line front end: one subcommand per verification suite.

    python -m vertexlab.cli cs-eigen --n 2 --nu 1.5 --recipe "0;1;2"
    python -m vertexlab.cli szego-identity --beta 2.0 --output reports/

Exit status is 0 when every check passes, 1 when a check fails and 2 for an
invalid configuration.
"""
import argparse
import logging
import sys

from .config import ALL_SUITES, RUN_KEYS, build_run_config, load_settings, read_config_file
from .errors import ConfigError, VertexLabError
from .reports import write_report, write_table
from .suites import run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vertexlab", description="Vertex operator and anyon verification suites")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in ALL_SUITES:
        sub = subparsers.add_parser(name, allow_abbrev=False)
        sub.add_argument("--config", help="key = value run configuration file")
        for key, kind in RUN_KEYS.items():
            # every parameter stays a string here so parse errors surface as ConfigError
            flags = [f"--{key}"] + ([f"--{key.lower()}"] if key.lower() != key else [])
            sub.add_argument(*flags, dest=key, default=None, metavar=kind.__name__.upper())
    return parser


def run(argv=None) -> int:
    settings = load_settings()
    logging.basicConfig(level=settings.log_level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        file_params = read_config_file(args.config) if args.config else {}
        overrides = {}
        for key, kind in RUN_KEYS.items():
            raw = getattr(args, key)
            if raw is not None:
                try:
                    overrides[key] = kind(raw)
                except ValueError as e:
                    raise ConfigError(f"Invalid value for --{key}: {raw!r}") from e
        run_config = build_run_config(args.command, file_params, overrides, settings)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        result = run_suite(run_config.command, run_config.params, settings.n_jobs)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except VertexLabError as e:
        logger.error(f"{run_config.command} failed: {e}", exc_info=True)
        print(f"{run_config.command}: FAIL {e}", file=sys.stderr)
        return EXIT_FAILED
    except Exception as e:
        logger.error(f"{run_config.command} crashed: {e}", exc_info=True)
        print(f"{run_config.command}: ERROR {e}", file=sys.stderr)
        return EXIT_FAILED

    write_report(result.report, run_config.output)
    if run_config.format == "csv":
        for name, rows in result.tables.items():
            write_table(rows, run_config.output, name)
    print(result.report.summary())
    return EXIT_OK if result.report.passed else EXIT_FAILED


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
