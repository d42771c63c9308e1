"""
JSON helpers for the line-oriented inputs and the canonical outputs.
"""

import json
import math
from typing import Any, Optional, Tuple


def parse_json_object(text: str) -> Tuple[Optional[dict], Optional[Tuple[int, str]]]:
    """
    Parse one JSON object.
    Returns (obj, None) on success or (None, (column, reason)) on failure.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        return None, (e.colno, e.msg)

    if not isinstance(obj, dict):
        return None, (1, f"expected a JSON object, got {type(obj).__name__}")

    return obj, None


def format_real(value: float) -> str:
    """Render a real with exactly two decimals; negative zero is folded to zero."""
    if not math.isfinite(value):
        raise ValueError(f"non-finite value {value!r} cannot be serialized")
    text = f"{value:.2f}"
    if text == "-0.00":
        return "0.00"
    return text


def dumps_canonical(obj: Any) -> str:
    """
    Serialize with fixed-precision reals and compact separators.
    Dict keys keep insertion order: callers build dicts in the order they want on disk.
    """
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}:{dumps_canonical(v)}" for k, v in obj.items())
        return "{" + ",".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_canonical(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_real(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def sort_keys(obj: Any) -> Any:
    """Copy of a nested structure with every dict in sorted key order."""
    if isinstance(obj, dict):
        return {k: sort_keys(obj[k]) for k in sorted(obj)}
    if isinstance(obj, (list, tuple)):
        return [sort_keys(v) for v in obj]
    return obj


def round_floats(obj: Any, ndigits: int = 6) -> Any:
    """Round every float in a nested structure (report output)."""
    if isinstance(obj, dict):
        return {k: round_floats(v, ndigits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, ndigits) for v in obj]
    if isinstance(obj, float):
        value = round(obj, ndigits)
        return 0.0 if value == 0 else value
    return obj
