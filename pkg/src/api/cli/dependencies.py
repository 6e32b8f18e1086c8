from pathlib import Path

from pydantic import ValidationError

from src.core.mc.entities import ExperimentConfig
from src.core.mc.exceptions import ConfigError
from src.core.settings import get_default_workers


def _error_keys(error: ValidationError) -> list[str]:
    keys = []
    for detail in error.errors():
        key = ".".join(str(part) for part in detail["loc"]) or "<root>"
        if key not in keys:
            keys.append(key)
    return keys


def load_experiment_config(path: str | Path, seed: int | None = None) -> ExperimentConfig:
    """
    Parse and validate a JSON experiment config; `seed` overrides base_seed
    """
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError([str(path)], f"cannot read config: {e.strerror}")
    try:
        config = ExperimentConfig.model_validate_json(text)
        if seed is not None:
            config = ExperimentConfig.model_validate(
                config.model_dump() | {"base_seed": seed}
            )
    except ValidationError as e:
        reasons = "; ".join(detail["msg"] for detail in e.errors())
        raise ConfigError(_error_keys(e), reasons)
    return config


def resolve_workers(workers: int | None) -> int:
    workers = get_default_workers() if workers is None else workers
    if workers < 1:
        raise ConfigError(["workers"], f"need at least one worker, got {workers}")
    return workers
