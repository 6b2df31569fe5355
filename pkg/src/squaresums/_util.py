"""Small shared helpers."""

from __future__ import annotations

import math


def format_real(value: float) -> str:
    """Round-trip-safe decimal text: 17 significant digits, `.` separator."""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.17g}"
