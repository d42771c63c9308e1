"""
Run configuration loaded from TOML.

Sections: [tracker], [filter], [metrics], [io], [scenario]; `workers` at top level.
Every violation is reported as a ConfigError naming the dotted key and its line.
"""

import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from xentrack.errors import ConfigError, StorageError
from xentrack.filter.kalman import DEFAULT_FILTER, FilterConfig
from xentrack.metrics.types import ScenarioConfig
from xentrack.tracker.types import TrackerConfig

logger = logging.getLogger(__name__)

_SECTION = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\-]+)\s*\]\s*(#.*)?$")
_TOML_POSITION = re.compile(r"at line (\d+), column (\d+)")


class MetricsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    match_iou: float = Field(0.5, ge=0.0, le=1.0, description="IoU at which a prediction counts as matching a GT instance.")


class IOConfig(BaseModel):
    """Default paths; command-line flags take precedence."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    detections: Optional[str] = Field(None, description="Detection file for `track`.")
    ground_truth: Optional[str] = Field(None, description="Ground-truth file for `eval`.")
    out: Optional[str] = Field(None, description="Track output file or directory.")
    background: Optional[str] = Field(None, description="Overlay background template, formatted with frame=<index>.")


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    tracker: TrackerConfig = Field(default_factory=TrackerConfig)
    filter: FilterConfig = Field(default_factory=lambda: DEFAULT_FILTER)
    metrics: MetricsConfig = Field(default_factory=MetricsConfig)
    io: IOConfig = Field(default_factory=IOConfig)
    scenario: Optional[ScenarioConfig] = Field(None, description="Scenario written by `synth`.")
    workers: int = Field(1, ge=1, description="Videos tracked concurrently.")


def key_line(text: str, dotted: str) -> Optional[int]:
    """1-based line where `dotted` (section.key or top-level key) is assigned, if found."""
    section, _, key = dotted.rpartition(".")
    assign = re.compile(rf"^\s*{re.escape(key)}\s*=")
    current = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        m = _SECTION.match(line)
        if m:
            current = m.group(1)
            if current == dotted:
                return lineno
            continue
        if current == section and assign.match(line):
            return lineno
    return None


def parse_run_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        data: dict[str, Any] = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        m = _TOML_POSITION.search(str(e))
        line = int(m.group(1)) if m else None
        raise ConfigError(f"{source}: invalid TOML: {e}", line=line) from e

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        err = e.errors()[0]
        loc = tuple(err.get("loc") or ())
        # Drop tuple indices so the key points at the array itself
        key = ".".join(str(p) for p in loc if isinstance(p, str))
        line = key_line(text, key) if key else None
        where = f"{source}:{line}" if line else source
        raise ConfigError(f"{where}: {key or 'config'}: {err['msg']}", key=key or None, line=line) from e


def load_run_config(path: Optional[Union[str, Path]]) -> RunConfig:
    """Load a TOML run config; None gives the defaults."""
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ConfigError(f"{path}: invalid UTF-8") from e
    except OSError as e:
        raise StorageError(str(path), e.strerror or str(e)) from e
    config = parse_run_config(text, str(path))
    logger.debug(f"Loaded run config from {path}")
    return config
