import logging
import os

from dotenv import load_dotenv

from src.core.mc.exceptions import ConfigError

load_dotenv()

DEFAULT_BURN_IN: int = 1000
DEFAULT_COND_LIMIT: float = 1e12
DEFAULT_FLOOR: float = 1e-12
DEFAULT_GRID_1D: int = 512
DEFAULT_GRID_3D: int = 64


def get_default_workers() -> int:
    value = os.environ.get("M2SPEC_WORKERS", "1")
    try:
        return int(value)
    except ValueError:
        raise ConfigError(["M2SPEC_WORKERS"], f"expected an integer, got {value!r}")


def get_log_level() -> str:
    level = os.environ.get("M2SPEC_LOG_LEVEL", "WARNING").upper()
    return level if level in logging.getLevelNamesMapping() else "WARNING"


def default_grid_size(d: int) -> int:
    return DEFAULT_GRID_1D if d == 1 else DEFAULT_GRID_3D
