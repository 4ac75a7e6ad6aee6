"""Logging configuration and run-context utilities"""

import os
import sys
from typing import Optional, Dict, Any
from dotenv import load_dotenv
from loguru import logger

# Load environment variables
load_dotenv()


class LoggingConfig:
    """Configuration for pipeline logging"""

    def __init__(self):
        self.level = os.getenv("PIDS_LOG_LEVEL", "INFO").upper()
        self.json_output = os.getenv("PIDS_LOG_JSON", "false").lower() == "true"
        self.project = os.getenv("PIDS_PROJECT", "pids-desk")

    def is_json(self) -> bool:
        """Check if records are serialized as JSON"""
        return self.json_output

    def get_status(self) -> Dict[str, Any]:
        """Get configuration status"""
        return {
            "level": self.level,
            "json": self.json_output,
            "project": self.project
        }


# Global configuration instance
logging_config = LoggingConfig()


def configure_logging(level: Optional[str] = None) -> None:
    """Install a single stderr sink; stdout stays free for command summaries"""
    logger.remove()
    logger.add(
        sys.stderr,
        level=(level or logging_config.level).upper(),
        serialize=logging_config.is_json(),
        format="{time:HH:mm:ss} | {level: <7} | {extra[run]} | {message}"
    )
    logger.configure(extra={"run": logging_config.project})


def get_run_metadata(
    command: Optional[str] = None,
    seed: Optional[int] = None,
    mode: Optional[str] = None,
    round_num: Optional[int] = None,
    epoch: Optional[int] = None,
    **kwargs
) -> Dict[str, Any]:
    """
    Generate standardized context for log records of one run

    Args:
        command: CLI command or pipeline step (e.g., "train_predictor")
        seed: Seed that drives the run
        mode: Predictor or search mode (e.g., "dense_sparse", "evolution")
        round_num: Evolution round
        epoch: Training epoch
        **kwargs: Additional custom metadata

    Returns:
        Dictionary suitable for ``logger.bind``
    """
    metadata = {"project": logging_config.project}

    if command:
        metadata["command"] = command
    if seed is not None:
        metadata["seed"] = seed
    if mode:
        metadata["mode"] = mode
    if round_num is not None:
        metadata["round"] = round_num
    if epoch is not None:
        metadata["epoch"] = epoch

    metadata.update(kwargs)
    metadata["run"] = get_run_name(command or "run", mode=mode, seed=seed)

    return metadata


def get_run_name(
    base_name: str,
    mode: Optional[str] = None,
    seed: Optional[int] = None,
    **kwargs
) -> str:
    """
    Generate a descriptive run name

    Args:
        base_name: Base name for the run (e.g., "evolve", "pretrain_macs")
        mode: Mode to include in name
        seed: Seed to include in name
        **kwargs: Additional identifiers

    Returns:
        Formatted run name
    """
    parts = [base_name]

    if mode:
        parts.append(f"[{mode}]")
    if seed is not None:
        parts.append(f"seed-{seed}")

    for key, value in kwargs.items():
        if value:
            parts.append(f"{key}:{value}")

    return " ".join(parts)
