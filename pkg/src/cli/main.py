#!/usr/bin/env python3
"""
Main CLI interface for fhclab.

Runs classification, construction, orbit and periodic-point experiments
from a YAML config and/or flags and writes deterministic reports.
"""

import sys
import argparse
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from ..core.config import ConfigManager
from ..core.base import ExperimentStatus
from ..core.errors import ConfigError
from ..core.orchestrator import Laboratory


def setup_logging(log_level: str, log_file: Optional[str] = None):
    """Set up logging configuration."""

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, str(log_level).upper(), logging.INFO))

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    # Console handler; stdout stays free for reports
    console_handler = logging.StreamHandler(sys.stderr)
    console_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    console_handler.setFormatter(console_formatter)
    root_logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file).expanduser()
        log_path.parent.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(log_path)
        file_formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        file_handler.setFormatter(file_formatter)
        root_logger.addHandler(file_handler)


def _overrides(args) -> Dict[str, Any]:
    """Experiment flags that take precedence over the config file."""
    overrides = {
        'weight': getattr(args, 'weight', None),
        'space': getattr(args, 'space', None),
        'p': getattr(args, 'p', None),
        'grid_step': getattr(args, 'grid_step', None),
        'horizon': getattr(args, 'horizon', None),
        'levels': getattr(args, 'levels', None),
        'targets': getattr(args, 'targets', None),
        'eps': getattr(args, 'eps', None),
        'step': getattr(args, 'step', None),
        'out': getattr(args, 'out', None),
    }
    if getattr(args, 'verbose', False):
        overrides['log_level'] = 'DEBUG'
    return overrides


def _run_experiment(args, experiment: str) -> int:
    """Load config, validate it, run one experiment and emit its report."""
    try:
        config_manager = ConfigManager(args.config, _overrides(args))
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return ExperimentStatus.CONFIG_ERROR.exit_code

    config = config_manager.config
    setup_logging(config.log_level, config.log_file)
    logger = logging.getLogger('fhclab.cli')

    errors = config_manager.validate_config()
    if errors:
        print("Configuration validation failed:", file=sys.stderr)
        for error in errors:
            print(f"  - {error}", file=sys.stderr)
        return ExperimentStatus.CONFIG_ERROR.exit_code

    lab = Laboratory(config_manager)
    out = Path(config.out).expanduser() if config.out else None
    result = lab.run(experiment, out)

    if out is None:
        sys.stdout.write(result.report.render())
    if result.message:
        print(f"{experiment}: {result.status.value}: {result.message}", file=sys.stderr)
    logger.info(f"{experiment} finished with status {result.status.value}")
    return result.exit_code


def cmd_classify(args):
    """Handle the classify command."""
    return _run_experiment(args, 'classify')


def cmd_construct(args):
    """Handle the construct command."""
    return _run_experiment(args, 'construct')


def cmd_orbit(args):
    """Handle the orbit command."""
    return _run_experiment(args, 'orbit')


def cmd_periodic(args):
    """Handle the periodic command."""
    return _run_experiment(args, 'periodic')


def cmd_config(args):
    """Handle the config command."""

    if args.init:
        config_path = args.config or ConfigManager.DEFAULT_CONFIG_PATHS[0]
        if config_path.exists() and not args.force:
            print(f"Configuration file already exists: {config_path}")
            print("Use --force to overwrite")
            return 1

        config_manager = ConfigManager()
        if config_manager.save_config(config_path):
            print(f"Configuration initialized at: {config_path}")
            return 0
        print("Failed to initialize configuration")
        return 1

    try:
        config_manager = ConfigManager(args.config)
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return ExperimentStatus.CONFIG_ERROR.exit_code

    if args.validate:
        errors = config_manager.validate_config()
        if errors:
            print("Configuration validation failed:")
            for error in errors:
                print(f"  - {error}")
            return ExperimentStatus.CONFIG_ERROR.exit_code
        print("Configuration is valid")
        return 0

    print("Current configuration:")
    print(yaml.safe_dump(config_manager._config_to_dict(), default_flow_style=False, sort_keys=True))
    return 0


def _experiment_flags() -> argparse.ArgumentParser:
    """Flags shared by every experiment subcommand; each mirrors a config key."""
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument('--weight', help='Weight shorthand, e.g. exponential:1, rational, constant:1, sinlog')
    flags.add_argument('--space', choices=['lp', 'c0'], help='Ambient space')
    flags.add_argument('--p', type=float, help='Exponent of the L^p space')
    flags.add_argument('--grid-step', dest='grid_step', help='Grid step h, e.g. 1/32')
    flags.add_argument('--horizon', type=int, help='Construction and scan horizon')
    flags.add_argument('--levels', type=int, help='Number of targets to use')
    flags.add_argument('--targets', nargs='+', help='Targets as chi(a,b)')
    flags.add_argument('--eps', type=float, help='Orbit hit radius')
    flags.add_argument('--step', help='Orbit scan step, e.g. 1/8')
    flags.add_argument('--out', help='Report file (stdout when omitted)')
    return flags


def main(argv=None):
    """Main CLI entry point."""

    parser = argparse.ArgumentParser(
        description="Frequent hypercyclicity laboratory for translation semigroups on weighted spaces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s classify --weight sinlog                     # Verdict table for one weight
  %(prog)s construct --targets "chi(0,1)" "chi(0,2)"    # Build and verify a vector
  %(prog)s orbit --step 1/8 --out orbit.report          # Hit densities of the orbit
  %(prog)s periodic                                     # Near-periodic point defects
  %(prog)s config --init                                # Create default configuration file

Exit codes: 0 budgets met, 2 budget violation, 3 hypothesis violation, 4 config error.
        """
    )

    parser.add_argument(
        '--config', '-c',
        type=Path,
        help='Path to configuration file'
    )

    parser.add_argument(
        '--verbose', '-v',
        action='store_true',
        help='Enable debug logging'
    )

    subparsers = parser.add_subparsers(dest='command', help='Available commands')
    flags = _experiment_flags()

    classify_parser = subparsers.add_parser('classify', parents=[flags], help='Classify a weight and space')
    classify_parser.set_defaults(func=cmd_classify)

    construct_parser = subparsers.add_parser('construct', parents=[flags], help='Build and verify an FHC vector')
    construct_parser.set_defaults(func=cmd_construct)

    orbit_parser = subparsers.add_parser('orbit', parents=[flags], help='Scan orbit hit densities')
    orbit_parser.set_defaults(func=cmd_orbit)

    periodic_parser = subparsers.add_parser('periodic', parents=[flags], help='Build a near-periodic point')
    periodic_parser.set_defaults(func=cmd_periodic)

    config_parser = subparsers.add_parser('config', help='Manage configuration')
    config_group = config_parser.add_mutually_exclusive_group()
    config_group.add_argument('--init', action='store_true', help='Initialize new config file')
    config_group.add_argument('--validate', action='store_true', help='Validate current config')
    config_parser.add_argument('--force', action='store_true', help='Force overwrite existing config')
    config_parser.set_defaults(func=cmd_config)

    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 1

    try:
        return args.func(args)
    except KeyboardInterrupt:
        print("\nOperation cancelled by user")
        return 130
    except Exception as e:
        print(f"Error: {e}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
