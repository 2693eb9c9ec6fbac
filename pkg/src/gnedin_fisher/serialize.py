"""Rendering of exact and float scalars for JSON/CSV output."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

SCHEMA_VERSION = "1"


def format_float(x: float) -> float | str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return float(f"{x:.17g}")


def rational_string(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def render_scalar(x):
    """Fractions become ``"p/q"`` strings; numpy scalars become Python ones."""
    if isinstance(x, bool):
        return x
    if isinstance(x, Fraction):
        return rational_string(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return format_float(x)
    if isinstance(x, (list, tuple)):
        return [render_scalar(v) for v in x]
    if isinstance(x, dict):
        return {k: render_scalar(v) for k, v in x.items()}
    return x


def value_record(x) -> dict:
    """``{"value": "p/q" or float-as-string, "float": float, "exact": bool}``."""
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        q = Fraction(x)
        return {"value": rational_string(q), "float": format_float(q), "exact": True}
    return {"value": repr(format_float(x)), "float": format_float(x), "exact": False}
