import argparse
from pathlib import Path
from typing import Callable, Dict, List, Optional

from base.config import load_run_config, parse_overrides
from base.log import get_logger
from core.errors import ConfigError, PfadError
from schema.config import RunConfig
from server.dependes import evaluate_, purify_, simulate_, sweep_, train_


logger = get_logger("cli")

EXIT_OK = 0
EXIT_ITEM_FAILURE = 1
EXIT_CONFIG_ERROR = 2

COMMANDS: Dict[str, Callable[[RunConfig, Path], dict]] = {
    "simulate": simulate_.run,
    "train": train_.run,
    "purify": purify_.run,
    "evaluate": evaluate_.run,
    "sweep": sweep_.run,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfad",
        allow_abbrev=False,
        description="Motion artifact simulation and removal with the PFAD reverse-diffusion loop.",
        epilog="Any configuration key can be overridden as '--key value'.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS), help="Command to run")
    parser.add_argument("--config", type=Path, default=None, help="Flat 'key = value' config file")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Returns:
        int: 0 on success, 1 if any item failed, 2 on configuration error
    """
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)

    try:
        overrides = parse_overrides(rest)
        config = load_run_config(args.config, overrides)
        out = args.out or (Path(config.out) if config.out else None)
        if out is None:
            raise ConfigError("Output directory is required (--out)")
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG_ERROR

    try:
        result = COMMANDS[args.command](config, out)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_CONFIG_ERROR
    except (PfadError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_ITEM_FAILURE

    if result["status_code"] != 200:
        logger.error(result["description"])
        return EXIT_ITEM_FAILURE
    logger.info(f"{args.command}: done, results in {out}")
    return EXIT_OK
