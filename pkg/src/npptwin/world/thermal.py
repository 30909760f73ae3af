"""Cell temperature resolution against the live mirror cache."""

from __future__ import annotations

from typing import Mapping, Optional

from .worldmap import WorldMap


def thermal_at(
    wm: WorldMap,
    cache_values: Optional[Mapping[str, float]],
    x_m: float,
    y_m: float,
) -> Optional[float]:
    """Temperature of the cell under (x, y), or None for unbound surfaces.

    Bound cells read the cached mirror value (whatever generation the
    caller holds -- staleness is the cache's concern, not this lookup's);
    a bound cell with no cached value yet reads as None, i.e. renders
    green rather than inventing a number.
    """
    cell = wm.cell_at_point(x_m, y_m)
    if cell is None:
        return None
    if cell.thermal_var is not None:
        if cache_values is None:
            return None
        return cache_values.get(cell.thermal_var)
    return cell.base_temp_c


def make_thermal_lookup(wm: WorldMap, cache_values: Optional[Mapping[str, float]]):
    """Cell-indexed lookup closure for the renderers."""
    half = wm.cell_size_m / 2.0

    def lookup(cx: int, cy: int) -> Optional[float]:
        return thermal_at(wm, cache_values, cx * wm.cell_size_m + half, cy * wm.cell_size_m + half)

    return lookup
