"""Deterministic JSON encoding for reports.

Non-finite floats are written as the strings ``"inf"``, ``"-inf"`` and
``"nan"``; keys are sorted and every top-level report carries ``"schema": 1``.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = 1


def jsonable(obj):
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [jsonable(obj.real), jsonable(obj.imag)]
    return obj


def dumps(payload: dict) -> str:
    body = {"schema": SCHEMA_VERSION, **payload}
    return json.dumps(jsonable(body), sort_keys=True, indent=2, allow_nan=False) + "\n"
