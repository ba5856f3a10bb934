# vertexlab/config.py
import logging
import math
import os
from dataclasses import dataclass, field

from .errors import ConfigError

logger = logging.getLogger(__name__)

ALL_SUITES = [
    "check-cocycle",
    "check-blips",
    "check-heisenberg",
    "check-car",
    "check-exchange",
    "w-commutators",
    "kronig",
    "anyon-corr",
    "cs-eigen",
    "cs-elliptic",
    "h-nu3-calibrate",
    "szego-identity",
    "kms-project",
]

# value parsers for run-config keys; anything else is rejected
RUN_KEYS = {
    "L": float,
    "Lambda": int,
    "kmax": float,
    "pmax": int,
    "nu": float,
    "nu0": float,
    "q": float,
    "beta": float,
    "N": int,
    "grid": int,
    "min_gap": float,
    "tolerance": float,
    "seed": int,
    "trials": int,
    "order": int,
    "eps": float,
    "eps_prime": float,
    "recipe": str,
    "format": str,
    "output": str,
}


@dataclass(frozen=True)
class Settings:
    output_dir: str = "reports"
    log_level: str = "INFO"
    seed: int = 20240601
    n_jobs: int = 1
    suites: tuple = tuple(ALL_SUITES)


def load_settings() -> Settings:
    """Read process-wide settings from VERTEXLAB_* environment variables."""
    raw_suites = os.getenv("VERTEXLAB_SUITES", "")
    suites = tuple(s.strip() for s in raw_suites.split(",") if s.strip()) or tuple(ALL_SUITES)
    unknown = [s for s in suites if s not in ALL_SUITES]
    if unknown:
        raise ConfigError(f"Unknown suites in VERTEXLAB_SUITES: {unknown}")

    try:
        seed = int(os.getenv("VERTEXLAB_SEED", "20240601"))
        n_jobs = int(os.getenv("VERTEXLAB_N_JOBS", "1"))
    except ValueError as e:
        raise ConfigError(f"Invalid integer in environment: {e}") from e

    return Settings(
        output_dir=os.getenv("VERTEXLAB_OUTPUT_DIR", "reports"),
        log_level=os.getenv("VERTEXLAB_LOG_LEVEL", "INFO").upper(),
        seed=seed,
        n_jobs=n_jobs,
        suites=suites,
    )


@dataclass
class RunConfig:
    """Parameters of one subcommand run; lengths in units of L, momenta in 2π/L."""
    command: str
    params: dict = field(default_factory=dict)
    output: str = ""
    format: str = "json"

    def get(self, key, default=None):
        return self.params.get(key, default)

    @property
    def L(self) -> float:
        return float(self.params.get("L", 2 * math.pi))


def parse_value(key: str, text: str):
    if key not in RUN_KEYS:
        raise ConfigError(f"Unknown configuration key '{key}'")
    try:
        return RUN_KEYS[key](text)
    except ValueError as e:
        raise ConfigError(f"Invalid value for '{key}': {text!r}") from e


def read_config_file(path: str) -> dict:
    """Parse `key = value` lines; '#' starts a comment."""
    params = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e

    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        params[key] = parse_value(key, value)
    return params


def build_run_config(command: str, file_params: dict, overrides: dict, settings: Settings) -> RunConfig:
    if command not in ALL_SUITES:
        raise ConfigError(f"Unknown command '{command}'")

    params = dict(file_params)
    params.update({k: v for k, v in overrides.items() if v is not None})
    params.setdefault("seed", settings.seed)

    if params.get("L", 1.0) <= 0:
        raise ConfigError("L must be positive")
    if params.get("Lambda", 0) < 0:
        raise ConfigError("Lambda must be non-negative")
    if not 0 <= params.get("q", 0.0) < 1:
        raise ConfigError("q must lie in [0, 1)")
    if params.get("beta", 1.0) <= 0:
        raise ConfigError("beta must be positive")
    if params.get("nu0", 1.0) <= 0:
        raise ConfigError("nu0 must be positive")
    fmt = params.pop("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"Unsupported format '{fmt}'")

    output = params.pop("output", "") or settings.output_dir
    logger.debug(f"Run config for {command}: {params}")
    return RunConfig(command=command, params=params, output=output, format=fmt)
