# Copyright (c) 2025 Stratoware LLC
# Licensed under the MIT License. See LICENSE file in the project root.

"""Runtime settings: keyword overrides, then environment, then YAML, then defaults."""

import os
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

from app.errors import InvalidInputError

ENV_THREADS = "TROPWITT_THREADS"
ENV_LOG_LEVEL = "TROPWITT_LOG_LEVEL"
ENV_CONFIG = "TROPWITT_CONFIG"

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    """Numerical tolerances, precision and worker count."""

    model_config = {"frozen": True, "extra": "forbid"}

    threads: int = Field(default=1, ge=1)
    precision_digits: int = Field(default=40, ge=25)
    tolerance_identity: float = Field(default=1e-9, gt=0)
    tolerance_product: float = Field(default=1e-6, gt=0)
    tolerance_hessian: float = Field(default=1e-6, gt=0)
    rational_max_denominator: int = Field(default=10 ** 6, ge=1)
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"unknown log level '{value}'")
        return level


def _read_config(config_path: str) -> Dict[str, Any]:
    try:
        with open(config_path, "r", encoding="utf-8") as file:
            data = yaml.safe_load(file)
    except FileNotFoundError:
        raise FileNotFoundError(f"Config file not found: {config_path}")
    except yaml.YAMLError as e:
        raise InvalidInputError(f"Invalid YAML format in {config_path}: {e}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InvalidInputError(f"Config file {config_path} must hold a mapping")
    return data


def load_settings(config_path: Optional[str] = None, **overrides: Any) -> Settings:
    """Resolve settings. ``None`` overrides are ignored."""
    if config_path is None:
        config_path = os.getenv(ENV_CONFIG)

    values: Dict[str, Any] = {}
    if config_path:
        values.update(_read_config(config_path))

    threads = os.getenv(ENV_THREADS)
    if threads:
        values["threads"] = threads
    log_level = os.getenv(ENV_LOG_LEVEL)
    if log_level:
        values["log_level"] = log_level

    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return Settings(**values)
    except ValidationError as e:
        raise InvalidInputError(f"Invalid settings: {e}")
