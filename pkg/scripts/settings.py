"""
Workbench Settings

Loads the run configuration with the precedence

    CLI flags > environment variables > YAML profile > built-in defaults

and sets up logging. The YAML file lives at config/workbench_config.yml
(override with WORKBENCH_CONFIG); a .env file at the project root is
loaded first so it can provide any of the recognized variables:

- HALL_CACHE_DIR: directory for the persistent Hall-number memo
- WORKBENCH_CONFIG: alternate YAML path
- WORKBENCH_PROFILE: profile name inside the YAML file
- WORKBENCH_LOG_LEVEL: logging level name (default WARNING)
"""

import logging
import os
import sys
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from errors import ConfigError, PreconditionError
from finite_field import is_prime_power

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.dirname(BASE_DIR)
DEFAULT_CONFIG_FILE = os.path.join(PROJECT_ROOT, "config", "workbench_config.yml")

LOG_FORMAT = "[%(asctime)s] [%(name)s] %(levelname)s %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def default_dim_bound(q: int) -> int:
    if q == 2:
        return 8
    if q == 3:
        return 7
    return 5


@dataclass(frozen=True)
class RunConfig:
    q: int = 2
    n: int = 2
    genus: int = 0
    order: int = 3
    dim_bound: Optional[int] = None
    seed: int = 0
    output: Optional[str] = None
    cache_dir: Optional[str] = None
    profile: str = "default"

    def __post_init__(self):
        if self.dim_bound is None:
            object.__setattr__(self, "dim_bound", default_dim_bound(self.q))
        self.validate()

    def validate(self):
        if not is_prime_power(self.q):
            raise PreconditionError(f"q must be a prime power, got {self.q}")
        if self.n < 1:
            raise PreconditionError(f"n must be positive, got {self.n}")
        if self.genus < 0:
            raise PreconditionError(f"genus must be nonnegative, got {self.genus}")
        if self.order < 0:
            raise PreconditionError(f"order must be nonnegative, got {self.order}")
        if self.dim_bound < 1:
            raise PreconditionError(f"dim_bound must be positive, got {self.dim_bound}")

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)


CONFIG_KEYS = {f.name for f in fields(RunConfig)}
INT_KEYS = {"q", "n", "genus", "order", "dim_bound", "seed"}

ENV_KEYS = {
    "cache_dir": "HALL_CACHE_DIR",
}


def load_env_file(env_file: Optional[str] = None) -> bool:
    """Load variables from the project .env file, if there is one."""
    env_file = env_file or os.path.join(PROJECT_ROOT, ".env")
    if not os.path.exists(env_file):
        return False
    load_dotenv(env_file)
    return True


def read_profiles(path: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    """Read all profiles from the YAML file; a missing file means no profiles."""
    path = path or os.environ.get("WORKBENCH_CONFIG") or DEFAULT_CONFIG_FILE
    if not os.path.exists(path):
        if path != DEFAULT_CONFIG_FILE:
            raise ConfigError(f"config file not found: {path}")
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    profiles = data.get("profiles", {}) if isinstance(data, dict) else None
    if not isinstance(profiles, dict):
        raise ConfigError(f"{path} must contain a 'profiles' mapping")
    return profiles


def _coerce(key: str, value: Any) -> Any:
    if key not in CONFIG_KEYS:
        raise ConfigError(f"unknown configuration key: {key}")
    if value is None:
        return None
    if key in INT_KEYS:
        try:
            return int(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key} must be an integer, got {value!r}") from exc
    return str(value)


def load_config(overrides: Optional[Dict[str, Any]] = None,
                config_path: Optional[str] = None,
                profile: Optional[str] = None) -> RunConfig:
    """
    Build a RunConfig from defaults, a YAML profile, the environment and
    explicit overrides (usually parsed CLI flags; None values are ignored).
    """
    load_env_file()
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    profile = profile or overrides.pop("profile", None) or os.environ.get("WORKBENCH_PROFILE") or "default"
    overrides.pop("profile", None)

    profiles = read_profiles(config_path)
    if profiles and profile not in profiles:
        raise ConfigError(f"unknown profile: {profile}")
    values: Dict[str, Any] = {}
    for key, value in (profiles.get(profile) or {}).items():
        values[key] = _coerce(key, value)

    for key, env_name in ENV_KEYS.items():
        if os.environ.get(env_name):
            values[key] = os.environ[env_name]

    for key, value in overrides.items():
        values[key] = _coerce(key, value)

    # A profile bound is tied to its q; a q given on the command line
    # without a bound falls back to the default bound for that q.
    if "q" in overrides and "dim_bound" not in overrides:
        values.pop("dim_bound", None)

    values["profile"] = profile
    return RunConfig(**values)


def with_overrides(config: RunConfig, **changes) -> RunConfig:
    return replace(config, **changes)


def configure_logging(verbose: bool = False) -> logging.Logger:
    """Attach one stderr handler to the root workbench logger."""
    root = logging.getLogger("workbench")
    level_name = "DEBUG" if verbose else os.environ.get("WORKBENCH_LOG_LEVEL", "WARNING").upper()
    level = logging.getLevelName(level_name)
    if not isinstance(level, int):
        raise ConfigError(f"unknown log level: {level_name}")
    root.setLevel(level)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
        root.addHandler(handler)
    return root


def get_logger(component: str) -> logging.Logger:
    return logging.getLogger(f"workbench.{component}")
