"""Grid plant layout loaded from a JSON document.

Map document fields:

    width, height      cell counts
    cell_size_m        meters per cell (default 1.0)
    rows               height strings of width terrain codes:
                       F flat, U uneven, S stairs, W wall, ~ water
    materials          either {code: palette_index} defaults per terrain,
                       or omitted (built-in defaults)
    material_rows      optional per-cell hex palette override rows
    zones              {name: [x, y, w, h]} cell rectangles
    spawns             {name: {x, y, z, yaw}} poses in meters/degrees
    target             {x, y, radius_m}, exactly one
    thermal_bindings   list of {rect: [x, y, w, h], var: name} live
                       bindings or {rect: ..., temp_c: value} static
                       temperatures; a cell may carry at most one

Validation is strict and names the offending row/column so broken maps
fail at load, not mid-render.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterator, Mapping, Optional


class Terrain(str, enum.Enum):
    FLAT = "F"
    UNEVEN = "U"
    STAIRS = "S"
    WALL = "W"
    WATER = "~"


TERRAIN_BY_CODE = {t.value: t for t in Terrain}

DEFAULT_MATERIALS = {"F": 0, "U": 1, "S": 2, "W": 3, "~": 6}

ZONE_NAMES_DEFAULT_MAP = (
    "reactor_building",
    "turbine_hall",
    "cooling_water",
    "power_area",
)


class MapValidationError(ValueError):
    def __init__(self, message: str, row: Optional[int] = None, col: Optional[int] = None):
        where = ""
        if row is not None:
            where = f" (row {row}" + (f", col {col}" if col is not None else "") + ")"
        super().__init__(message + where)
        self.row = row
        self.col = col


@dataclass(frozen=True)
class Cell:
    terrain: Terrain
    material: int = 0
    base_temp_c: Optional[float] = None
    thermal_var: Optional[str] = None


@dataclass(frozen=True)
class Zone:
    name: str
    x: int
    y: int
    w: int
    h: int

    def contains_cell(self, cx: int, cy: int) -> bool:
        return self.x <= cx < self.x + self.w and self.y <= cy < self.y + self.h


@dataclass(frozen=True)
class Target:
    x: float
    y: float
    radius_m: float


@dataclass(frozen=True)
class SpawnPose:
    x: float
    y: float
    z: float = 0.0
    yaw: float = 0.0


@dataclass
class WorldMap:
    width: int
    height: int
    cell_size_m: float
    cells: list  # row-major list of Cell
    zones: dict[str, Zone]
    spawns: dict[str, SpawnPose]
    target: Target
    thermal_bindings: list = field(default_factory=list)
    name: str = "unnamed"

    def in_bounds(self, cx: int, cy: int) -> bool:
        return 0 <= cx < self.width and 0 <= cy < self.height

    def cell(self, cx: int, cy: int) -> Cell:
        return self.cells[cy * self.width + cx]

    def cell_at_point(self, x_m: float, y_m: float) -> Optional[Cell]:
        cx = int(x_m // self.cell_size_m)
        cy = int(y_m // self.cell_size_m)
        if not self.in_bounds(cx, cy):
            return None
        return self.cell(cx, cy)

    def iter_zone_cells(self, zone_name: str) -> Iterator[tuple[int, int, Cell]]:
        zone = self.zones[zone_name]
        for cy in range(zone.y, zone.y + zone.h):
            for cx in range(zone.x, zone.x + zone.w):
                yield cx, cy, self.cell(cx, cy)


def _known_registry_names() -> set[str]:
    from ..plant.registry import build_registry

    return {d.name for d in build_registry()}


def load_map(doc: Mapping, known_vars: Optional[set[str]] = None) -> WorldMap:
    if known_vars is None:
        known_vars = _known_registry_names()

    try:
        width = int(doc["width"])
        height = int(doc["height"])
        rows = list(doc["rows"])
        target_doc = doc["target"]
    except KeyError as exc:
        raise MapValidationError(f"missing required field {exc.args[0]!r}") from None
    cell_size = float(doc.get("cell_size_m", 1.0))
    if width < 1 or height < 1:
        raise MapValidationError(f"grid must be at least 1x1, got {width}x{height}")
    if cell_size <= 0:
        raise MapValidationError(f"cell_size_m must be positive, got {cell_size}")
    if len(rows) != height:
        raise MapValidationError(f"expected {height} rows, got {len(rows)}")

    materials = dict(DEFAULT_MATERIALS)
    materials.update(doc.get("materials", {}))
    material_rows = doc.get("material_rows")
    if material_rows is not None and len(material_rows) != height:
        raise MapValidationError(f"expected {height} material_rows, got {len(material_rows)}")

    cells: list[Cell] = []
    for cy, row in enumerate(rows):
        if len(row) != width:
            raise MapValidationError(f"row has {len(row)} cells, expected {width}", row=cy)
        for cx, code in enumerate(row):
            terrain = TERRAIN_BY_CODE.get(code)
            if terrain is None:
                raise MapValidationError(f"unknown terrain code {code!r}", row=cy, col=cx)
            if material_rows is not None:
                try:
                    material = int(material_rows[cy][cx], 16)
                except (ValueError, IndexError):
                    raise MapValidationError("bad material digit", row=cy, col=cx) from None
            else:
                material = int(materials.get(code, 0))
            cells.append(Cell(terrain=terrain, material=material))

    def _rect(name: str, raw) -> tuple[int, int, int, int]:
        try:
            x, y, w, h = (int(v) for v in raw)
        except (TypeError, ValueError):
            raise MapValidationError(f"{name}: rect must be [x, y, w, h], got {raw!r}") from None
        if w < 1 or h < 1 or x < 0 or y < 0 or x + w > width or y + h > height:
            raise MapValidationError(f"{name}: rect {raw!r} outside {width}x{height} grid")
        return x, y, w, h

    zones = {}
    for name, raw in dict(doc.get("zones", {})).items():
        x, y, w, h = _rect(f"zone {name!r}", raw)
        zones[name] = Zone(name, x, y, w, h)

    spawns = {}
    for name, raw in dict(doc.get("spawns", {})).items():
        pose = SpawnPose(
            x=float(raw["x"]), y=float(raw["y"]),
            z=float(raw.get("z", 0.0)), yaw=float(raw.get("yaw", 0.0)),
        )
        if not (0 <= pose.x < width * cell_size and 0 <= pose.y < height * cell_size):
            raise MapValidationError(f"spawn {name!r} at ({pose.x}, {pose.y}) outside map")
        spawns[name] = pose

    if isinstance(target_doc, list):
        raise MapValidationError("exactly one target object required")
    target = Target(
        x=float(target_doc["x"]),
        y=float(target_doc["y"]),
        radius_m=float(target_doc.get("radius_m", 0.5)),
    )
    if not (0 <= target.x < width * cell_size and 0 <= target.y < height * cell_size):
        raise MapValidationError(f"target at ({target.x}, {target.y}) outside map")
    if target.radius_m <= 0:
        raise MapValidationError("target radius_m must be positive")

    bindings = list(doc.get("thermal_bindings", []))
    assigned: dict[int, str] = {}
    for i, binding in enumerate(bindings):
        x, y, w, h = _rect(f"thermal_bindings[{i}]", binding.get("rect"))
        var = binding.get("var")
        temp = binding.get("temp_c")
        if (var is None) == (temp is None):
            raise MapValidationError(
                f"thermal_bindings[{i}]: exactly one of var/temp_c required"
            )
        if var is not None and var not in known_vars:
            raise MapValidationError(
                f"thermal_bindings[{i}]: unknown variable {var!r}"
            )
        for cy in range(y, y + h):
            for cx in range(x, x + w):
                idx = cy * width + cx
                if idx in assigned:
                    raise MapValidationError(
                        f"thermal_bindings[{i}]: cell already bound by {assigned[idx]}",
                        row=cy, col=cx,
                    )
                assigned[idx] = f"thermal_bindings[{i}]"
                old = cells[idx]
                if var is not None:
                    cells[idx] = Cell(old.terrain, old.material, None, var)
                else:
                    cells[idx] = Cell(old.terrain, old.material, float(temp), None)

    return WorldMap(
        width=width,
        height=height,
        cell_size_m=cell_size,
        cells=cells,
        zones=zones,
        spawns=spawns,
        target=target,
        thermal_bindings=bindings,
        name=str(doc.get("name", "unnamed")),
    )


def load_map_file(path: str, known_vars: Optional[set[str]] = None) -> WorldMap:
    with open(path, "r", encoding="utf-8") as fh:
        return load_map(json.load(fh), known_vars)


def default_map_doc() -> dict:
    text = resources.files("npptwin.world").joinpath("maps/npp_default.json").read_text("utf-8")
    return json.loads(text)


def load_default_map() -> WorldMap:
    return load_map(default_map_doc())
