"""
json_io.py
----------
Canonical JSON for reports and the input files of the command line.

Reports are written with sorted keys, compact separators and Python's
shortest round-trip float repr, so the same run always produces the same
bytes. Non-finite floats are written as the strings "inf", "-inf" and "nan".
"""

import hashlib
import json
import logging
import math
import sys
from fractions import Fraction
from typing import Any, Optional

import numpy as np

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars, fractions, tuples and non-finite floats to plain JSON values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    return value


def canonical_dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def digest(obj: Any) -> str:
    """First 16 hex digits of the SHA-256 of the canonical JSON of obj."""
    return hashlib.sha256(canonical_dumps(obj).encode("utf-8")).hexdigest()[:16]


def load_json(path: str) -> Any:
    """
    Load a JSON input file.

    Args:
        path: File path

    Returns:
        Parsed JSON value

    Raises:
        OSError: file cannot be read
        json.JSONDecodeError: file is not valid JSON
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Could not load JSON from {path}: {e}")
        raise


def write_report(report: Any, path: Optional[str] = None):
    """
    Write a report as canonical JSON followed by a newline.

    Args:
        report: JSON-serializable report
        path: Output file, or None for stdout
    """
    text = canonical_dumps(report) + "\n"
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"Report written to {path}")
