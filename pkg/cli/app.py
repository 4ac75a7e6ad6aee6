"""CLI command aggregation and the shared run wrapper"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional
from loguru import logger
from pydantic import ValidationError as SchemaValidationError
from config.logging_config import configure_logging, get_run_metadata, logging_config
from config.settings import RunConfig
from exceptions import PidsError
from cli.common import CommandContext, write_json
from cli.commands import disposition, cost, forward, dataset, predictor, search

# Include all command modules
COMMAND_MODULES = [disposition, cost, forward, dataset, predictor, search]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pids",
        description="Point interaction search: geometry, cost model, predictors and evolution"
    )
    parser.add_argument("--config", help="Config file with PIDS_SECTION__KEY=value lines")
    parser.add_argument("--seed", type=int, help="Overrides every seed in the config")
    parser.add_argument("--out", help="Output directory (default: config out_dir)")
    parser.add_argument("--log-level", help="Overrides PIDS_LOG_LEVEL")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMAND_MODULES:
        module.register(subparsers)
    return parser


def _context(args) -> CommandContext:
    config = RunConfig.from_file(args.config).with_seed(args.seed)
    if args.out:
        config = config.model_copy(update={"out_dir": args.out})
    return CommandContext(config=config, out_dir=Path(config.out_dir))


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one command and print its single-line JSON summary.

    Returns:
        0 on success, 2 for invalid input (bad arguments, config, genotype or
        files), 1 for anything else
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    logger.debug(f"Logging status: {logging_config.get_status()}")

    try:
        ctx = _context(args)
        log = logger.bind(**get_run_metadata(command=args.command, seed=ctx.seed))
        log.info(f"Running {args.command}, outputs in {ctx.out_dir}")

        write_json(ctx.config.resolved(), ctx.path("resolved_config.json"))
        result = args.handler(args, ctx)
    except (PidsError, SchemaValidationError) as e:
        logger.error(f"{args.command} rejected its input: {e}")
        print(json.dumps({"command": args.command, "error": str(e)}))
        return EXIT_INVALID
    except Exception as e:
        logger.exception(f"{args.command} failed: {e}")
        print(json.dumps({"command": args.command, "error": str(e)}))
        return EXIT_FAILURE

    print(json.dumps(result.model_dump(mode="json", exclude_none=True), sort_keys=True))
    return EXIT_OK


def main():
    sys.exit(run())
