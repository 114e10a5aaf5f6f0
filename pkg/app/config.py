"""
Environment-backed settings.

Precedence everywhere: CLI flag > config file > environment (.env) > default.
"""
import os
from dataclasses import dataclass
from typing import Dict, List, Optional

from dotenv import load_dotenv

from app.exceptions import ConfigError

load_dotenv()


@dataclass(frozen=True)
class Settings:
    log_level: str = "INFO"
    log_file: Optional[str] = None
    workers: int = 1
    results_dir: str = "results"
    mlflow_tracking_uri: Optional[str] = None


def get_settings() -> Settings:
    """Read settings from the environment (after .env has been loaded)."""
    workers = os.getenv("PLC_WORKERS", "1")
    try:
        n_workers = max(1, int(workers))
    except ValueError:
        n_workers = 1

    return Settings(
        log_level=os.getenv("LOG_LEVEL", "INFO"),
        log_file=os.getenv("PLC_LOG_FILE") or None,
        workers=n_workers,
        results_dir=os.getenv("PLC_RESULTS_DIR", "results"),
        mlflow_tracking_uri=os.getenv("MLFLOW_TRACKING_URI") or None,
    )


def load_config_file(path: str) -> Dict[str, str]:
    """
    Parse a flat key=value file. Blank lines and `#` comments are skipped, keys
    may use `-` or `_` (normalized to `_`). Values are returned as strings;
    pydantic models coerce them.
    """
    try:
        with open(path) as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e

    values: Dict[str, str] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        values[key.replace("-", "_")] = value
    return values


def parse_float_list(text: str) -> List[float]:
    """'0.1,0.2, 0.3' -> [0.1, 0.2, 0.3]"""
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from e
