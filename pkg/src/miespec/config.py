# tolerance defaults, config-file loading and range parsing
import logging
import os
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

from dotenv import dotenv_values

from .errors import ConfigError

logger = logging.getLogger(__name__)

LOG_LEVEL_ENV = "MIESPEC_LOG_LEVEL"
TOLERANCE_PREFIX = "tolerance."

# relative tolerances of the verification report, one per check family
DEFAULT_TOLERANCES: Dict[str, float] = {
    "energy_fd": 1e-6,
    "norm": 1e-10,
    "orthogonality": 1e-8,
    "ode_residual": 1e-8,
    "hft_quadrature": 1e-9,
    "hft_derivative": 1e-8,
    "virial": 1e-8,
    "ladder_action": 1e-10,
    "algebra": 1e-12,
    "identity": 1e-10,
    "matrix_elements": 1e-9,
    "probe": 1e-8,
}

MAX_GRID_COUNT = 1_000_000


def resolve_tolerances(overrides: Optional[Mapping[str, float]] = None) -> Dict[str, float]:
    """Defaults with validated overrides applied"""
    tolerances = dict(DEFAULT_TOLERANCES)
    for key, value in (overrides or {}).items():
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {key!r}; known: {', '.join(sorted(DEFAULT_TOLERANCES))}")
        value = float(value)
        if not value > 0:
            raise ConfigError(f"tolerance {key} must be positive, got {value}")
        tolerances[key] = value
    return tolerances


# KEY=VAL pairs from --tolerance flags
def parse_tolerance_pairs(pairs: Optional[List[str]]) -> Dict[str, float]:
    parsed = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"tolerance must look like KEY=VALUE, got {pair!r}")
        parsed[key.strip()] = _as_float(value, f"tolerance {key.strip()}")
    return parsed


def load_config_file(path: str) -> Dict[str, str]:
    """Flat KEY=VALUE settings; keys keep their case"""
    config_path = Path(path)
    if not config_path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = dotenv_values(config_path)
    settings = {}
    for key, value in values.items():
        if value is None:
            raise ConfigError(f"config key {key!r} in {path} has no value")
        settings[key.strip()] = value.strip()
    logger.debug(f"loaded {len(settings)} settings from {path}")
    return settings


# tolerance.KEY entries of a config mapping
def tolerances_from_settings(settings: Mapping[str, str]) -> Dict[str, float]:
    return {
        key[len(TOLERANCE_PREFIX):]: _as_float(value, key)
        for key, value in settings.items()
        if key.startswith(TOLERANCE_PREFIX)
    }


def _as_float(text: str, what: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{what} must be a number, got {text!r}")


def _as_int(text: str, what: str) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise ConfigError(f"{what} must be an integer, got {text!r}")


def parse_int_range(text, what: str = "value") -> List[int]:
    """'a..b' (inclusive), 'a,b,c' or a single integer"""
    if isinstance(text, int):
        return [text]
    if isinstance(text, (list, tuple)):
        return [_as_int(item, what) for item in text]
    text = str(text).strip()
    if ".." in text:
        start, _, stop = text.partition("..")
        low, high = _as_int(start, what), _as_int(stop, what)
        if high < low:
            raise ConfigError(f"{what} range {text!r} is empty")
        return list(range(low, high + 1))
    values = [_as_int(part, what) for part in text.split(",") if part.strip()]
    if not values:
        raise ConfigError(f"{what} is empty")
    return values


def parse_bool(text, what: str = "flag") -> bool:
    if isinstance(text, bool):
        return text
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"{what} must be true or false, got {text!r}")


def parse_grid(spec: str) -> Tuple[str, float, float, int]:
    """'lin:start:stop:count' or 'log:start:stop:count'"""
    parts = str(spec).split(":")
    if len(parts) != 4 or parts[0] not in ("lin", "log"):
        raise ConfigError(f"grid must be lin:start:stop:count or log:start:stop:count, got {spec!r}")
    kind = parts[0]
    start = _as_float(parts[1], "grid start")
    stop = _as_float(parts[2], "grid stop")
    count = _as_int(parts[3], "grid count")
    if not 1 <= count <= MAX_GRID_COUNT:
        raise ConfigError(f"grid count must lie in [1, {MAX_GRID_COUNT}], got {count}")
    if not start > 0:
        raise ConfigError(f"grid must start at r > 0, got {start}")
    if count > 1 and not stop > start:
        raise ConfigError(f"grid stop {stop} must exceed start {start}")
    return kind, start, stop, count


def log_level_from_env(default: str = "WARNING") -> str:
    return os.getenv(LOG_LEVEL_ENV, default).upper()
