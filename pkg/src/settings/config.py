import os
from dataclasses import dataclass, fields

from src.errors import ConfigError
from src.settings.constants import (
    BATCH_SIZE,
    DEFAULT_MAX_STEPS,
    DEFAULT_RUNS,
    DEFAULT_SEED,
    DEFAULT_WORKERS,
    ENV_PREFIX,
)


@dataclass
class Settings:
    seed: int = DEFAULT_SEED
    workers: int = DEFAULT_WORKERS
    max_steps: int = DEFAULT_MAX_STEPS
    runs: int = DEFAULT_RUNS
    batch_size: int = BATCH_SIZE
    output_format: str = "table"
    debug: bool = False

    @classmethod
    def from_env(cls, environ=None) -> "Settings":
        """
        Build settings from ``RPT_*`` environment variables, falling back to defaults.

        :param environ: mapping to read instead of ``os.environ``
        :return: Settings
        """
        environ = os.environ if environ is None else environ
        values = {}
        for f in fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            values[f.name] = _coerce(f.name, raw, type(f.default))
        return cls(**values)

    def resolved_workers(self) -> int:
        if self.workers < 0:
            raise ConfigError("workers must be >= 0")
        return self.workers or (os.cpu_count() or 1)


def _coerce(name: str, raw: str, kind: type):
    if kind is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"invalid value for {ENV_PREFIX}{name.upper()}: {raw!r}") from exc
