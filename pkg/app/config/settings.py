import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional, Union

from pydantic import BaseSettings, Field


class Settings(BaseSettings):
    app_name: str = "TwinCurveX"
    debug: bool = False
    log_level: Optional[str] = None  # overrides debug when set, e.g. "WARNING"

    integer_bit_width: int = 128
    prime_enumeration_budget: int = 100_000
    twin_search_limit: int = 10_000_000

    classgroup_imaginary_bound: int = 1_000_000
    classgroup_real_bound: int = 100_000

    series_truncation_budget: int = 100_000
    series_tolerance: float = 1e-12
    quadrature_max_refinements: int = 8

    sweep_p_max_budget: int = 10_000
    sweep_d_max_budget: int = 1_000
    sweep_workers: int = 0  # 0 -> os.cpu_count()

    cache_backend: str = "memory"  # "memory" or "redis"
    redis_url: str = Field("redis://localhost:6379/0", env="REDIS_URL")
    cache_ttl_seconds: int = 86_400

    class Config:
        env_file = ".env"
        env_prefix = "TWINCURVE_"


_overrides: Dict[str, Any] = {}


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings(**_overrides)


def load_settings(
    config_file: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Settings:
    """
    Install process-wide settings with precedence flags > config file > environment > defaults.

    Args:
        config_file: Optional JSON file whose keys are Settings field names
        overrides: Values from command-line flags; None entries are ignored

    Returns:
        The merged Settings instance now returned by get_settings()
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        values.update(json.loads(Path(config_file).read_text()))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    Settings(**values)  # validate before installing
    _overrides.clear()
    _overrides.update(values)
    get_settings.cache_clear()
    return get_settings()


def current_overrides() -> Dict[str, Any]:
    """Values needed to rebuild the active settings in a worker process."""
    return dict(_overrides)
