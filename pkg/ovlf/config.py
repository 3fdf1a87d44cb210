"""
Runtime configuration: defaults, OVLF_* environment overrides and CLI overrides
"""
import logging
import os
from fractions import Fraction
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, field_validator

from .errors import SpecSyntaxError

logger = logging.getLogger(__name__)

ENV_PREFIX = "OVLF_"

# environment variable suffix -> field name
ENV_FIELDS = {
    "MEMORY_CAP_SYMBOLS": "memory_cap_symbols",
    "T_N_MAX": "t_n_max",
    "DEPTH_CAP": "depth_cap",
    "DEFAULT_HORIZON": "default_horizon",
    "TAIL_FRACTION": "tail_fraction",
    "TOL": "tolerance",
    "OUTPUT_FORMAT": "output_format",
    "LOG_LEVEL": "log_level",
    "JOBS": "jobs",
    "SEED": "seed",
}


def parse_fraction(value: Any) -> Fraction:
    """Parse '1/100', '0.01', an int or a Fraction into an exact Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise SpecSyntaxError(f"not a rational number: {value!r}") from e


class Config(BaseModel):
    """Toolkit configuration"""

    model_config = ConfigDict(arbitrary_types_allowed=True, validate_assignment=True)

    memory_cap_symbols: int = 1 << 28
    t_n_max: int = 30
    depth_cap: int = 24
    default_horizon: int = 1 << 20
    tail_fraction: Fraction = Fraction(1, 2)
    tolerance: Fraction = Fraction(1, 100)
    output_format: str = "csv"
    log_level: str = "INFO"
    jobs: int = 1
    seed: int = 0

    @field_validator("tail_fraction", "tolerance", mode="before")
    @classmethod
    def _to_fraction(cls, v: Any) -> Fraction:
        try:
            return parse_fraction(v)
        except SpecSyntaxError as e:
            raise ValueError(str(e)) from e

    @field_validator("tail_fraction")
    @classmethod
    def _tail_in_unit_interval(cls, v: Fraction) -> Fraction:
        if not 0 < v < 1:
            raise ValueError("tail_fraction must lie strictly between 0 and 1")
        return v

    @field_validator("tolerance")
    @classmethod
    def _tolerance_nonnegative(cls, v: Fraction) -> Fraction:
        if v < 0:
            raise ValueError("tolerance must be >= 0")
        return v

    @field_validator("memory_cap_symbols", "t_n_max", "depth_cap", "default_horizon", "jobs")
    @classmethod
    def _positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator("output_format")
    @classmethod
    def _known_format(cls, v: str) -> str:
        if v not in ("csv", "tsv", "human"):
            raise ValueError("output_format must be one of csv, tsv, human")
        return v

    @classmethod
    def from_env(cls, overrides: Optional[Dict[str, Any]] = None) -> "Config":
        """Build a config from .env / OVLF_* variables, then apply overrides"""
        load_dotenv()
        values: Dict[str, Any] = {}
        for suffix, field in ENV_FIELDS.items():
            raw = os.getenv(ENV_PREFIX + suffix)
            if raw is not None and raw != "":
                values[field] = raw
        if overrides:
            values.update({k: v for k, v in overrides.items() if v is not None})
        config = cls(**values)
        logger.debug(f"Configuration loaded: {config.model_dump()}")
        return config


_config: Optional[Config] = None


def get_config() -> Config:
    global _config
    if _config is None:
        _config = Config.from_env()
    return _config


def set_config(config: Optional[Config]) -> None:
    """Install a process-wide config (None resets to lazy env loading)"""
    global _config
    _config = config
