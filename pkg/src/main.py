"""
Cross-lingual Semantic Gradients - Main Entry Point
Fits supervised semantic gradients per language, compares them across
languages with permutation tests and a bootstrap interval, and clusters the
vocabulary around their difference.
"""
import argparse
import logging
import sys

from pipeline.runner import cmd_cluster, cmd_compare, cmd_fit, cmd_report, cmd_synth
from synth.generator import SynthSpec
from utils.config import Config, RunConfig
from utils.errors import ConfigurationError, SSDError

COMMANDS = ('fit', 'compare', 'cluster', 'synth', 'report')


def setup_logging(verbose: bool = False):
    """Configure logging for the application."""
    level = logging.DEBUG if verbose else getattr(logging, Config.LOG_LEVEL, logging.INFO)

    handlers = [logging.StreamHandler(sys.stdout)]
    if Config.LOG_FILE:
        # Use UTF-8 encoding for file handler to support non-ASCII vocabularies
        handlers.append(logging.FileHandler(Config.LOG_FILE, encoding='utf-8'))

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='Cross-lingual supervised semantic gradients: fit, compare, cluster'
    )
    parser.add_argument(
        'command',
        choices=COMMANDS,
        help='fit gradients, compare languages, cluster difference poles, '
             'generate synthetic data, or summarize reports'
    )
    parser.add_argument(
        '--config',
        default=None,
        help='Run configuration JSON (a synthetic spec JSON for "synth")'
    )
    parser.add_argument(
        '--seed',
        type=int,
        default=None,
        help='Override the configured seed'
    )
    parser.add_argument(
        '--out',
        default=None,
        help='Override the output directory'
    )
    parser.add_argument(
        '--force',
        action='store_true',
        help='Cluster even when the difference test is not significant'
    )
    parser.add_argument(
        '--workers',
        type=int,
        default=None,
        help='Number of concurrent workers (default: SSD_WORKERS or 1)'
    )
    parser.add_argument(
        '--verbose',
        action='store_true',
        help='Enable verbose logging (DEBUG level)'
    )
    return parser


def load_run_config(args) -> RunConfig:
    if not args.config:
        raise ConfigurationError(f"'{args.command}' needs --config PATH")
    config = RunConfig.from_file(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.out:
        config.output_dir = args.out
    return config


def run(args) -> int:
    """
    Execute one command.

    Returns:
        Process exit code
    """
    logger = logging.getLogger(__name__)
    Config.validate()
    workers = args.workers if args.workers is not None else Config.WORKERS
    if workers < 1:
        raise ConfigurationError('--workers must be positive')

    if args.command == 'synth':
        spec = SynthSpec.from_file(args.config) if args.config else SynthSpec()
        if args.seed is not None:
            spec.seed = args.seed
        result = cmd_synth(spec, args.out or 'synth_data')
    elif args.command == 'report':
        output_dir = args.out or load_run_config(args).output_dir
        result = cmd_report(output_dir)
    else:
        config = load_run_config(args)
        if args.command == 'fit':
            result = cmd_fit(config, workers)
        elif args.command == 'compare':
            result = cmd_compare(config, workers)
        else:
            result = cmd_cluster(config, workers, force=args.force)

    for path in result.paths:
        logger.info(f"Wrote {path}")
    return result.exit_code


def main(argv=None):
    """Main entry point for the command-line driver."""
    args = build_parser().parse_args(argv)

    # Setup logging
    setup_logging(args.verbose)
    logger = logging.getLogger(__name__)

    logger.info("=" * 60)
    logger.info(f"Cross-lingual semantic gradients: {args.command}")
    logger.info("=" * 60)

    try:
        code = run(args)
    except SSDError as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.exit(e.exit_code)
    except KeyboardInterrupt:
        logger.info("\nShutdown requested by user")
        sys.exit(130)
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        sys.exit(1)
    sys.exit(code)


if __name__ == "__main__":
    main()
