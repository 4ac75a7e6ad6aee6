"""Configuration modules"""

from .logging_config import logging_config, configure_logging, get_run_metadata, get_run_name
from .settings import (
    RunConfig,
    GeometryConfig,
    NetworkConfig,
    ProfileConfig,
    TrainConfig,
    PredictorConfig,
    EvolutionConfig,
    OracleConfig,
)

__all__ = [
    "logging_config",
    "configure_logging",
    "get_run_metadata",
    "get_run_name",
    "RunConfig",
    "GeometryConfig",
    "NetworkConfig",
    "ProfileConfig",
    "TrainConfig",
    "PredictorConfig",
    "EvolutionConfig",
    "OracleConfig",
]
