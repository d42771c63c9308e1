import os
from typing import Union

from dotenv import load_dotenv

from xentrack.errors import ConfigError

load_dotenv()

# Run config used when --config is not given
XENTRACK_CONFIG = os.getenv("XENTRACK_CONFIG") or None

# Logging
XENTRACK_LOG_LEVEL = os.getenv("XENTRACK_LOG_LEVEL", "INFO")

# Worker pool for `track`; parsed on use with env_int
XENTRACK_WORKERS = os.getenv("XENTRACK_WORKERS", "1")

# Default seed for `synth` and `bench`; parsed on use with env_int
XENTRACK_SEED = os.getenv("XENTRACK_SEED", "0")


def env_int(name: str, value: Union[str, int]) -> int:
    """Integer value of an environment setting, or ConfigError naming the variable."""
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"${name} must be an integer, got {value!r}", key=name) from None
