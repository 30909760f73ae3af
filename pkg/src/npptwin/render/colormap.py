"""Thermal colormap: blue at -100 C through red at +100 C, green for
surfaces that have no temperature at all."""

from __future__ import annotations

import math
from typing import Optional

GREEN = (0, 255, 0)

T_MIN = -100.0
T_MAX = 100.0


def thermal_color(t_c: Optional[float]) -> tuple[int, int, int]:
    """Linear blue-to-red map over [-100, 100] C, clamped outside.

    None (and NaN, which carries no temperature information either)
    renders green, keeping temperature-less surfaces out of the
    blue/red spectrum.
    """
    if t_c is None or math.isnan(t_c):
        return GREEN
    u = (t_c - T_MIN) / (T_MAX - T_MIN)
    if u < 0.0:
        u = 0.0
    elif u > 1.0:
        u = 1.0
    r = math.floor(255.0 * u + 0.5)
    return (r, 0, 255 - r)
