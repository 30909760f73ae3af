"""Orthographic full-map raster with robot markers and trace overlays.

Layer order: terrain, then enabled trace polylines in each robot's
color, then 3x3 robot markers with a one-pixel heading tick.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import cos, radians, sin
from typing import Callable, Iterable, Optional, Sequence

from ..world.worldmap import Terrain, WorldMap
from .colormap import thermal_color
from .image import Image

DEFAULT_PX_PER_CELL = 4

TERRAIN_COLORS = {
    Terrain.FLAT: (96, 96, 96),
    Terrain.UNEVEN: (118, 104, 88),
    Terrain.STAIRS: (158, 130, 84),
    Terrain.WALL: (38, 42, 56),
    Terrain.WATER: (36, 84, 150),
}

MARKER_TICK_COLOR = (255, 255, 255)


@dataclass(frozen=True)
class RobotMarker:
    id: str
    x_m: float
    y_m: float
    yaw_deg: float
    color: tuple[int, int, int]
    trace: Sequence[tuple[float, float]] = field(default=())


def render_topdown(
    wm: WorldMap,
    mode: str,
    px_per_cell: int = DEFAULT_PX_PER_CELL,
    robots: Iterable[RobotMarker] = (),
    thermal_lookup: Optional[Callable[[int, int], Optional[float]]] = None,
) -> Image:
    if px_per_cell < 1:
        raise ValueError(f"px_per_cell must be >= 1, got {px_per_cell}")
    if mode not in ("lit", "thermal"):
        raise ValueError(f"mode must be lit or thermal, got {mode!r}")
    ppc = px_per_cell
    img = Image(wm.width * ppc, wm.height * ppc)
    thermal = mode == "thermal"
    if thermal and thermal_lookup is None:
        def thermal_lookup(cx: int, cy: int):  # noqa: F811 - default lookup
            return wm.cell(cx, cy).base_temp_c

    for cy in range(wm.height):
        for cx in range(wm.width):
            if thermal:
                color = thermal_color(thermal_lookup(cx, cy))
            else:
                color = TERRAIN_COLORS[wm.cell(cx, cy).terrain]
            img.fill_rect(cx * ppc, cy * ppc, ppc, ppc, color)

    scale = ppc / wm.cell_size_m
    robots = list(robots)
    for marker in robots:
        points = [(int(px * scale), int(py * scale)) for px, py in marker.trace]
        for (x0, y0), (x1, y1) in zip(points, points[1:]):
            _line(img, x0, y0, x1, y1, marker.color)

    for marker in robots:
        mx = int(marker.x_m * scale)
        my = int(marker.y_m * scale)
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                _put_safe(img, mx + dx, my + dy, marker.color)
        yaw = radians(marker.yaw_deg)
        _put_safe(img, mx + round(2.0 * cos(yaw)), my + round(2.0 * sin(yaw)), MARKER_TICK_COLOR)
    return img


def _put_safe(img: Image, x: int, y: int, color: tuple[int, int, int]) -> None:
    if 0 <= x < img.width and 0 <= y < img.height:
        img.put(x, y, color)


def _line(img: Image, x0: int, y0: int, x1: int, y1: int, color) -> None:
    """Bresenham segment, clipped per pixel."""
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        _put_safe(img, x0, y0, color)
        if x0 == x1 and y0 == y1:
            return
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy
