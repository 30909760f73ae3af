#!/usr/bin/env python3
"""Regenerate the bundled npp_default map.

The plant floor is a 72x48 grid with four zones: the power (switchyard)
area and circulating-water basin on the west, the turbine hall in the
middle, and the reactor building on the east.  Run from the repo root:

    python3 tools/gen_default_map.py
"""

import json
import os

W, H = 72, 48

FLAT, UNEVEN, STAIRS, WALL, WATER = "F", "U", "S", "W", "~"


def main() -> None:
    grid = [[FLAT] * W for _ in range(H)]
    mats = [[0] * W for _ in range(H)]

    def block(x, y, w, h, terrain, material):
        for cy in range(y, y + h):
            for cx in range(x, x + w):
                grid[cy][cx] = terrain
                mats[cy][cx] = material

    def ring(x0, y0, x1, y1, material):
        for cx in range(x0, x1 + 1):
            grid[y0][cx] = WALL
            mats[y0][cx] = material
            grid[y1][cx] = WALL
            mats[y1][cx] = material
        for cy in range(y0, y1 + 1):
            grid[cy][x0] = WALL
            mats[cy][x0] = material
            grid[cy][x1] = WALL
            mats[cy][x1] = material

    # Site perimeter.
    ring(0, 0, W - 1, H - 1, 3)

    # Power area: switchyard transformers on gravel.
    block(4, 5, 2, 2, WALL, 9)
    block(8, 5, 2, 2, WALL, 9)
    block(12, 5, 2, 2, WALL, 9)
    block(3, 10, 14, 10, UNEVEN, 1)

    # Circulating-water basin and two cooling tower bases.
    block(4, 29, 12, 12, WATER, 6)
    block(17, 28, 2, 2, WALL, 12)
    block(17, 34, 2, 2, WALL, 12)

    # Turbine hall shell with west/east doors.
    ring(21, 3, 54, 44, 3)
    for y in (23, 24):
        grid[y][21] = FLAT
        mats[y][21] = 0
        grid[y][54] = FLAT
        mats[y][54] = 0
    # One HP + three LP turbine casings and the generator.
    block(24, 6, 4, 3, WALL, 4)
    block(30, 6, 4, 3, WALL, 4)
    block(36, 6, 4, 3, WALL, 4)
    block(42, 6, 4, 3, WALL, 4)
    block(48, 6, 4, 3, WALL, 8)
    # Mezzanine stairs by the west door.
    block(22, 9, 2, 3, STAIRS, 2)

    # Reactor building shell with a door facing the turbine hall.
    ring(55, 7, 70, 40, 3)
    for y in (23, 24):
        grid[y][55] = FLAT
        mats[y][55] = 0
    # Reactor vessel, two SG feed piping runs, stairs, spent-fuel pool.
    block(61, 20, 4, 6, WALL, 5)
    block(57, 14, 2, 6, WALL, 10)
    block(57, 28, 2, 6, WALL, 10)
    block(66, 12, 2, 2, STAIRS, 2)
    block(66, 34, 3, 4, WATER, 6)

    doc = {
        "name": "npp_default",
        "width": W,
        "height": H,
        "cell_size_m": 1.0,
        "rows": ["".join(row) for row in grid],
        "material_rows": ["".join(f"{m:x}" for m in row) for row in mats],
        "zones": {
            "power_area": [2, 2, 18, 22],
            "cooling_water": [2, 26, 18, 20],
            "turbine_hall": [21, 3, 34, 42],
            "reactor_building": [55, 7, 16, 34],
        },
        "spawns": {
            "default": {"x": 38.5, "y": 25.5, "z": 0.0, "yaw": 0.0},
            "aerial": {"x": 25.5, "y": 38.5, "z": 0.0, "yaw": 0.0},
            "valve_sg1_feed": {"x": 59.5, "y": 16.5, "z": 0.0, "yaw": 180.0},
        },
        "target": {"x": 66.5, "y": 30.5, "radius_m": 0.5},
        "thermal_bindings": [
            {"rect": [4, 29, 12, 12], "var": "cond_cw_out_c"},
            {"rect": [61, 20, 4, 6], "var": "t_hot_c"},
            {"rect": [57, 14, 2, 6], "var": "t_cold_c"},
            {"rect": [57, 28, 2, 6], "var": "t_cold_c"},
            {"rect": [24, 6, 4, 3], "temp_c": 55.0},
            {"rect": [30, 6, 4, 3], "temp_c": 48.0},
            {"rect": [66, 34, 3, 4], "temp_c": 35.0},
        ],
    }

    out = os.path.join(
        os.path.dirname(__file__), "..", "src", "npptwin", "world", "maps", "npp_default.json"
    )
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print(f"wrote {os.path.normpath(out)}")


if __name__ == "__main__":
    main()
