"""
Metric reports as deterministic JSON: keys sorted, two-space indent, reals rounded to 6 digits.
"""

import json
import logging
from pathlib import Path
from typing import Union

from xentrack.errors import StorageError
from xentrack.metrics.types import MetricsReport
from xentrack.utils.json_codec import round_floats

logger = logging.getLogger(__name__)


def dumps_report(report: MetricsReport) -> str:
    return json.dumps(round_floats(report.model_dump()), sort_keys=True, indent=2) + "\n"


def write_report(report: MetricsReport, path: Union[str, Path]) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps_report(report), encoding="utf-8", newline="\n")
    except OSError as e:
        raise StorageError(str(path), e.strerror or str(e)) from e
    logger.info(f"Wrote report to {path}")
