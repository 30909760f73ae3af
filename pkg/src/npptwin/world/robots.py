"""Robot kinematics on the grid: moves, bearings, swarms, possession.

Locomotion classes gate which terrain a robot may enter:

    FLAT    all kinds          UNEVEN  quadruped, aerial
    STAIRS  bipedal, aerial    WATER   aerial
    WALL    nobody

Moves are discrete: 1.0 m translations along the heading, exact 15 degree
turns, 0.5 m altitude steps (aerial only, 0..10 m).  A blocked move
leaves the pose untouched and reports a collision.  Robots never block
each other; only terrain does.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field
from typing import Optional

from .worldmap import Terrain, WorldMap

ROBOT_KINDS = ("wheeled", "bipedal", "quadruped", "aerial")

TURN_STEP_DEG = 15.0
TRANSLATE_STEP_M = 1.0
ALTITUDE_STEP_M = 0.5
AERIAL_CEILING_M = 10.0

PASSABLE = {
    Terrain.FLAT: frozenset(ROBOT_KINDS),
    Terrain.UNEVEN: frozenset(("quadruped", "aerial")),
    Terrain.STAIRS: frozenset(("bipedal", "aerial")),
    Terrain.WATER: frozenset(("aerial",)),
    Terrain.WALL: frozenset(),
}

MOVE_ACTIONS = ("forward", "backward", "turn_left", "turn_right", "up", "down")

# Deterministic per-robot trace/marker colors, assigned round-robin.
ROBOT_COLOR_PALETTE = (
    (255, 212, 42),
    (66, 135, 245),
    (240, 84, 84),
    (84, 200, 120),
    (196, 110, 255),
    (255, 150, 64),
    (64, 220, 220),
    (235, 235, 235),
)


class IllegalActionError(ValueError):
    """Action not available for this locomotion class."""


class PossessionConflictError(RuntimeError):
    """Robot already possessed by a different session."""


class SwarmCapacityError(ValueError):
    """Zone cannot stage the requested swarm."""


def wrap_deg(deg: float) -> float:
    """Normalize to (-180, 180]; 15 degree lattice values stay exact."""
    r = math.fmod(deg + 180.0, 360.0)
    if r <= 0.0:
        r += 360.0
    return r - 180.0


@dataclass
class RobotState:
    id: str
    kind: str = "wheeled"
    x_m: float = 0.5
    y_m: float = 0.5
    z_m: float = 0.0
    yaw_deg: float = 0.0
    trace_enabled: bool = False
    possessed_by: Optional[str] = None
    color: tuple[int, int, int] = ROBOT_COLOR_PALETTE[0]
    spawn: tuple[float, float, float, float] = field(default=None)  # x, y, z, yaw

    def __post_init__(self):
        if self.kind not in ROBOT_KINDS:
            raise ValueError(f"unknown robot kind {self.kind!r}")
        if self.spawn is None:
            self.spawn = (self.x_m, self.y_m, self.z_m, self.yaw_deg)

    @property
    def pose(self) -> tuple[float, float, float, float]:
        return (self.x_m, self.y_m, self.z_m, self.yaw_deg)

    def teleport_to_spawn(self) -> None:
        self.x_m, self.y_m, self.z_m, self.yaw_deg = self.spawn


def passable(cell_terrain: Terrain, kind: str) -> bool:
    return kind in PASSABLE[cell_terrain]


def apply_move(robot: RobotState, action: str, wm: WorldMap) -> bool:
    """Apply one action in place; returns True when the move collided."""
    if action == "turn_left":
        robot.yaw_deg = wrap_deg(robot.yaw_deg + TURN_STEP_DEG)
        return False
    if action == "turn_right":
        robot.yaw_deg = wrap_deg(robot.yaw_deg - TURN_STEP_DEG)
        return False
    if action in ("up", "down"):
        if robot.kind != "aerial":
            raise IllegalActionError(f"{action} is aerial-only, robot is {robot.kind}")
        nz = robot.z_m + (ALTITUDE_STEP_M if action == "up" else -ALTITUDE_STEP_M)
        if not 0.0 <= nz <= AERIAL_CEILING_M:
            return True
        robot.z_m = nz
        return False
    if action in ("forward", "backward"):
        sign = 1.0 if action == "forward" else -1.0
        yaw_rad = math.radians(robot.yaw_deg)
        nx = robot.x_m + sign * TRANSLATE_STEP_M * math.cos(yaw_rad)
        ny = robot.y_m + sign * TRANSLATE_STEP_M * math.sin(yaw_rad)
        cx = int(nx // wm.cell_size_m)
        cy = int(ny // wm.cell_size_m)
        if not wm.in_bounds(cx, cy):
            return True
        if not passable(wm.cell(cx, cy).terrain, robot.kind):
            return True
        robot.x_m = nx
        robot.y_m = ny
        return False
    raise IllegalActionError(f"unknown action {action!r}")


def compass_bearing(robot: RobotState, target_x: float, target_y: float) -> float:
    """Relative angle of the target: 0 dead ahead, positive counter-clockwise."""
    dx = target_x - robot.x_m
    dy = target_y - robot.y_m
    if dx == 0.0 and dy == 0.0:
        return 0.0
    return wrap_deg(math.degrees(math.atan2(dy, dx)) - robot.yaw_deg)


def distance_to(robot: RobotState, x: float, y: float) -> float:
    return math.hypot(x - robot.x_m, y - robot.y_m)


def spawn_swarm(
    wm: WorldMap,
    n: int,
    zone_name: str,
    seed: int = 0,
    kind: str = "wheeled",
    id_prefix: str = "swarm_",
) -> list[RobotState]:
    """Stage ``n`` robots on adjacent FLAT cells in a compact rectangle.

    Deterministic for a given seed: the seed picks the anchor among all
    block positions that fit inside the zone.  Falls back to row-major
    fill of flat cells when no rectangular block fits.
    """
    if zone_name not in wm.zones:
        raise SwarmCapacityError(f"unknown zone {zone_name!r}")
    zone = wm.zones[zone_name]
    flat = [
        (cx, cy)
        for cx, cy, cell in wm.iter_zone_cells(zone_name)
        if cell.terrain == Terrain.FLAT
    ]
    if len(flat) < n:
        raise SwarmCapacityError(
            f"zone {zone_name!r} has capacity {len(flat)} flat cells, need {n}"
        )
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    flat_set = set(flat)
    anchors = []
    for ay in range(zone.y, zone.y + zone.h - rows + 1):
        for ax in range(zone.x, zone.x + zone.w - cols + 1):
            if all((ax + i, ay + j) in flat_set for j in range(rows) for i in range(cols)):
                anchors.append((ax, ay))
    if anchors:
        ax, ay = anchors[random.Random(seed).randrange(len(anchors))]
        cells = [(ax + k % cols, ay + k // cols) for k in range(n)]
    else:
        cells = flat[:n]
    robots = []
    half = wm.cell_size_m / 2.0
    for k, (cx, cy) in enumerate(cells):
        robots.append(
            RobotState(
                id=f"{id_prefix}{k:02d}",
                kind=kind,
                x_m=cx * wm.cell_size_m + half,
                y_m=cy * wm.cell_size_m + half,
                yaw_deg=0.0,
                color=ROBOT_COLOR_PALETTE[k % len(ROBOT_COLOR_PALETTE)],
            )
        )
    return robots


class PossessionRegistry:
    """Exclusive session-to-robot control binding."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._robot_owner: dict[str, str] = {}
        self._session_robot: dict[str, str] = {}

    def possess(self, session_id: str, robot_id: str) -> Optional[str]:
        """Bind; returns the robot the session released, if any."""
        with self._lock:
            owner = self._robot_owner.get(robot_id)
            if owner is not None and owner != session_id:
                raise PossessionConflictError(
                    f"robot {robot_id!r} already possessed by session {owner!r}"
                )
            released = self._session_robot.get(session_id)
            if released == robot_id:
                return None
            if released is not None:
                del self._robot_owner[released]
            self._session_robot[session_id] = robot_id
            self._robot_owner[robot_id] = session_id
            return released

    def release_session(self, session_id: str) -> Optional[str]:
        with self._lock:
            robot_id = self._session_robot.pop(session_id, None)
            if robot_id is not None:
                self._robot_owner.pop(robot_id, None)
            return robot_id

    def owner(self, robot_id: str) -> Optional[str]:
        with self._lock:
            return self._robot_owner.get(robot_id)

    def robot_of(self, session_id: str) -> Optional[str]:
        with self._lock:
            return self._session_robot.get(session_id)
