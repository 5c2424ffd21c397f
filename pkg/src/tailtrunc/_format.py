"""Text forms of numbers shared by the CSV and JSON writers."""
from __future__ import annotations

import math

import numpy as np


def format_number(v) -> str:
    """Shortest round-trip text; ``inf`` spelled out, ``nan``/``None`` empty."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return ""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def json_value(v):
    """JSON-safe value: ``inf`` as the string ``"inf"``, ``nan`` as null."""
    if v is None or isinstance(v, (str, bool)):
        return v
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    v = float(v)
    if math.isnan(v):
        return None
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v
