from .worldmap import (
    Terrain,
    Cell,
    WorldMap,
    Zone,
    Target,
    SpawnPose,
    MapValidationError,
    load_map,
    load_map_file,
    load_default_map,
    default_map_doc,
)
from .robots import (
    RobotState,
    ROBOT_KINDS,
    MOVE_ACTIONS,
    IllegalActionError,
    PossessionConflictError,
    PossessionRegistry,
    SwarmCapacityError,
    apply_move,
    compass_bearing,
    spawn_swarm,
    wrap_deg,
)
from .thermal import thermal_at
from .trace import TRACE_HEADER, TraceLog, TraceRecord, format_trace_row

__all__ = [
    "Terrain",
    "Cell",
    "WorldMap",
    "Zone",
    "Target",
    "SpawnPose",
    "MapValidationError",
    "load_map",
    "load_map_file",
    "load_default_map",
    "default_map_doc",
    "RobotState",
    "ROBOT_KINDS",
    "MOVE_ACTIONS",
    "IllegalActionError",
    "PossessionConflictError",
    "PossessionRegistry",
    "SwarmCapacityError",
    "apply_move",
    "compass_bearing",
    "spawn_swarm",
    "wrap_deg",
    "thermal_at",
    "TRACE_HEADER",
    "TraceLog",
    "TraceRecord",
    "format_trace_row",
]
