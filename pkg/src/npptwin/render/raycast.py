"""First-person software raycaster over the cell grid.

One ray per image column across a 90 degree horizontal field of view.
Grid traversal is the classic DDA walk to the nearest WALL cell; column
height is ``height * cell_size / (d * cos(offset))`` where ``d`` is the
euclidean hit distance and the cosine removes the fisheye.  Thermal mode
changes colors only -- the set of wall-hit columns is identical to lit
mode for the same snapshot by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from ..world.worldmap import Terrain, WorldMap
from .colormap import GREEN, thermal_color
from .image import Image

FOV_DEG = 90.0

FLOOR_GRAY = (64, 64, 64)     # 25% gray
CEILING_GRAY = (31, 31, 31)   # 12% gray

# Wall colors by Cell.material (lit mode).
MATERIAL_PALETTE = (
    (150, 150, 150),  # 0 concrete
    (122, 112, 100),  # 1 gravel
    (172, 140, 92),   # 2 stair tread
    (70, 80, 100),    # 3 structural wall
    (140, 150, 170),  # 4 steel
    (148, 72, 62),    # 5 brick
    (42, 94, 168),    # 6 water basin
    (94, 116, 94),    # 7 painted panel
    (180, 170, 120),  # 8 crane yellow
    (96, 96, 128),    # 9 transformer
    (120, 140, 160),  # 10 piping
    (160, 120, 160),  # 11 control cabinet
    (200, 200, 210),  # 12 cladding
    (90, 70, 50),     # 13 timber
    (60, 60, 60),     # 14 asphalt
    (210, 120, 90),   # 15 warning paint
)


@dataclass(frozen=True)
class Hit:
    distance: float
    cx: int
    cy: int
    side: int  # 0: vertical grid line crossed, 1: horizontal


def cast_ray(wm: WorldMap, ox: float, oy: float, dx: float, dy: float) -> Optional[Hit]:
    """DDA walk from (ox, oy) along normalized (dx, dy) to the first WALL.

    Distances are in map units (cells); exact for axis-aligned rays.
    Returns None when the ray leaves the grid without hitting a wall.
    """
    map_x = int(math.floor(ox))
    map_y = int(math.floor(oy))
    if dx > 0.0:
        step_x, delta_x = 1, 1.0 / dx
        side_x = (map_x + 1.0 - ox) * delta_x
    elif dx < 0.0:
        step_x, delta_x = -1, -1.0 / dx
        side_x = (ox - map_x) * delta_x
    else:
        step_x, delta_x, side_x = 0, math.inf, math.inf
    if dy > 0.0:
        step_y, delta_y = 1, 1.0 / dy
        side_y = (map_y + 1.0 - oy) * delta_y
    elif dy < 0.0:
        step_y, delta_y = -1, -1.0 / dy
        side_y = (oy - map_y) * delta_y
    else:
        step_y, delta_y, side_y = 0, math.inf, math.inf

    while True:
        if side_x < side_y:
            dist = side_x
            side_x += delta_x
            map_x += step_x
            side = 0
        else:
            dist = side_y
            side_y += delta_y
            map_y += step_y
            side = 1
        if not wm.in_bounds(map_x, map_y):
            return None
        if wm.cell(map_x, map_y).terrain == Terrain.WALL:
            return Hit(dist * wm.cell_size_m, map_x, map_y, side)


def render_first_person(
    wm: WorldMap,
    x_m: float,
    y_m: float,
    yaw_deg: float,
    mode: str,
    width: int,
    height: int,
    thermal_lookup: Optional[Callable[[int, int], Optional[float]]] = None,
) -> Image:
    if width < 1 or height < 1:
        raise ValueError(f"render dimensions must be >= 1, got {width}x{height}")
    if mode not in ("lit", "thermal"):
        raise ValueError(f"mode must be lit or thermal, got {mode!r}")
    img = Image(width, height)
    thermal = mode == "thermal"
    if thermal:
        img.fill(GREEN)
    else:
        half = height // 2
        img.fill_rows(0, half, CEILING_GRAY)
        img.fill_rows(half, height, FLOOR_GRAY)
    if thermal and thermal_lookup is None:
        def thermal_lookup(cx: int, cy: int):  # noqa: F811 - default lookup
            return wm.cell(cx, cy).base_temp_c

    yaw_rad = math.radians(yaw_deg)
    ox = x_m / wm.cell_size_m
    oy = y_m / wm.cell_size_m
    for col in range(width):
        t = 2.0 * (col + 0.5) / width - 1.0  # plane coordinate, FOV 90
        offset = math.atan(t)
        cos_off = 1.0 / math.sqrt(1.0 + t * t)
        angle = yaw_rad + offset
        hit = cast_ray(wm, ox, oy, math.cos(angle), math.sin(angle))
        if hit is None:
            continue
        h_f = height * wm.cell_size_m / (hit.distance * cos_off)
        h_px = height if h_f >= height else int(h_f)
        if h_px <= 0:
            continue
        y0 = (height - h_px) // 2
        if thermal:
            color = thermal_color(thermal_lookup(hit.cx, hit.cy))
        else:
            color = MATERIAL_PALETTE[wm.cell(hit.cx, hit.cy).material % 16]
            if hit.side == 1:
                # Shade horizontal-line hits for depth cueing.
                color = (color[0] * 2 // 3, color[1] * 2 // 3, color[2] * 2 // 3)
        img.fill_column(col, y0, y0 + h_px, color)
    return img
