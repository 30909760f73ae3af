"""Bridge command grammar (the text bodies inside command frames).

    vget /robot/<id>/location          -> ok <x> <y> <z>
    vget /robot/<id>/rotation          -> ok <yaw>
    vget /robot/<id>/compass           -> ok <deg>
    vget /robot/<id>/trace             -> ok <csv bytes>
    vset /robot/<id>/move forward|backward
    vset /robot/<id>/rotate left|right
    vset /robot/<id>/altitude up|down  -> moves answer ok <x> <y> <z> <collided>
    vset /robot/<id>/trace on|off      -> ok <on|off>
    vget /camera/<id>/lit <w> <h>      -> ok <PPM bytes>
    vget /camera/<id>/thermal <w> <h>  -> ok <PPM bytes>
    vget /topdown lit|thermal          -> ok <PPM bytes>
    vget /target/location              -> ok <x> <y> <z>
    vget /plant/<var>                  -> ok <value> <stale_ms>
    vset /plant/<var> <decimal>        -> ok <requested>
    vset /session/possess <robot_id>   -> ok <robot_id>
    vset /env/reset                    -> ok <PPM bytes>
    vrun /env/step <action_id>         -> ok <reward> <done> <dist> <PPM bytes>
    vrun /swarm/spawn <n> <zone>       -> ok <id> ...
    vrun /sim/advance <ms>             -> ok <t_ms>   (lockstep only)
    vget /sim/time                     -> ok <t_ms>

Unknown verbs or paths answer ``error 400 ...``; the full response
vocabulary also includes error 403/404/409.  parse/format round-trip
byte-identically for every grammatical body.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

ROBOT_ID_RE = re.compile(r"^[A-Za-z0-9_\-]+$")
DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
INT_RE = re.compile(r"^(0|[1-9][0-9]*)$")
VAR_RE = re.compile(r"^[a-z0-9_]+$")
ZONE_RE = re.compile(r"^[a-z0-9_]+$")


class CommandError(ValueError):
    """Unparseable command body; answered as error 400."""

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


@dataclass(frozen=True)
class RobotQuery:
    robot_id: str
    what: str  # location | rotation | compass | trace


@dataclass(frozen=True)
class Move:
    robot_id: str
    direction: str  # forward | backward


@dataclass(frozen=True)
class Rotate:
    robot_id: str
    direction: str  # left | right


@dataclass(frozen=True)
class Altitude:
    robot_id: str
    direction: str  # up | down


@dataclass(frozen=True)
class TraceSet:
    robot_id: str
    enabled: bool


@dataclass(frozen=True)
class Camera:
    robot_id: str
    mode: str  # lit | thermal
    width: int
    height: int


@dataclass(frozen=True)
class Topdown:
    mode: str


@dataclass(frozen=True)
class TargetLocation:
    pass


@dataclass(frozen=True)
class PlantGet:
    var: str


@dataclass(frozen=True)
class PlantSet:
    var: str
    value: float
    text: str


@dataclass(frozen=True)
class Possess:
    robot_id: str


@dataclass(frozen=True)
class EnvReset:
    pass


@dataclass(frozen=True)
class EnvStep:
    action_id: int


@dataclass(frozen=True)
class SwarmSpawn:
    n: int
    zone: str


@dataclass(frozen=True)
class SimAdvance:
    ms: int


@dataclass(frozen=True)
class SimTime:
    pass


Command = (
    RobotQuery | Move | Rotate | Altitude | TraceSet | Camera | Topdown
    | TargetLocation | PlantGet | PlantSet | Possess | EnvReset | EnvStep
    | SwarmSpawn | SimAdvance | SimTime
)


def _fail(body: str) -> CommandError:
    return CommandError(f"cannot parse {body!r}")


def _int(token: str, body: str) -> int:
    if not INT_RE.match(token):
        raise _fail(body)
    return int(token)


def parse_command(body: str) -> Command:
    tokens = body.split(" ")
    if any(t == "" for t in tokens) or len(tokens) < 2:
        raise _fail(body)
    verb, path, args = tokens[0], tokens[1], tokens[2:]
    if not path.startswith("/"):
        raise _fail(body)
    parts = path[1:].split("/")

    if verb == "vget":
        if parts[:1] == ["robot"] and len(parts) == 3 and not args:
            rid, what = parts[1], parts[2]
            if ROBOT_ID_RE.match(rid) and what in ("location", "rotation", "compass", "trace"):
                return RobotQuery(rid, what)
        if parts[:1] == ["camera"] and len(parts) == 3 and len(args) == 2:
            rid, mode = parts[1], parts[2]
            if ROBOT_ID_RE.match(rid) and mode in ("lit", "thermal"):
                return Camera(rid, mode, _int(args[0], body), _int(args[1], body))
        if path == "/topdown" and len(args) == 1 and args[0] in ("lit", "thermal"):
            return Topdown(args[0])
        if path == "/target/location" and not args:
            return TargetLocation()
        if parts[:1] == ["plant"] and len(parts) == 2 and not args:
            if VAR_RE.match(parts[1]):
                return PlantGet(parts[1])
        if path == "/sim/time" and not args:
            return SimTime()
        raise _fail(body)

    if verb == "vset":
        if parts[:1] == ["robot"] and len(parts) == 3 and len(args) == 1:
            rid, what, arg = parts[1], parts[2], args[0]
            if ROBOT_ID_RE.match(rid):
                if what == "move" and arg in ("forward", "backward"):
                    return Move(rid, arg)
                if what == "rotate" and arg in ("left", "right"):
                    return Rotate(rid, arg)
                if what == "altitude" and arg in ("up", "down"):
                    return Altitude(rid, arg)
                if what == "trace" and arg in ("on", "off"):
                    return TraceSet(rid, arg == "on")
        if parts[:1] == ["plant"] and len(parts) == 2 and len(args) == 1:
            if VAR_RE.match(parts[1]) and DECIMAL_RE.match(args[0]):
                return PlantSet(parts[1], float(args[0]), args[0])
        if path == "/session/possess" and len(args) == 1 and ROBOT_ID_RE.match(args[0]):
            return Possess(args[0])
        if path == "/env/reset" and not args:
            return EnvReset()
        raise _fail(body)

    if verb == "vrun":
        if path == "/env/step" and len(args) == 1:
            return EnvStep(_int(args[0], body))
        if path == "/swarm/spawn" and len(args) == 2 and ZONE_RE.match(args[1]):
            return SwarmSpawn(_int(args[0], body), args[1])
        if path == "/sim/advance" and len(args) == 1:
            ms = _int(args[0], body)
            if ms < 1:
                raise _fail(body)
            return SimAdvance(ms)
        raise _fail(body)

    raise _fail(body)


def format_command(cmd: Command) -> str:
    if isinstance(cmd, RobotQuery):
        return f"vget /robot/{cmd.robot_id}/{cmd.what}"
    if isinstance(cmd, Move):
        return f"vset /robot/{cmd.robot_id}/move {cmd.direction}"
    if isinstance(cmd, Rotate):
        return f"vset /robot/{cmd.robot_id}/rotate {cmd.direction}"
    if isinstance(cmd, Altitude):
        return f"vset /robot/{cmd.robot_id}/altitude {cmd.direction}"
    if isinstance(cmd, TraceSet):
        return f"vset /robot/{cmd.robot_id}/trace {'on' if cmd.enabled else 'off'}"
    if isinstance(cmd, Camera):
        return f"vget /camera/{cmd.robot_id}/{cmd.mode} {cmd.width} {cmd.height}"
    if isinstance(cmd, Topdown):
        return f"vget /topdown {cmd.mode}"
    if isinstance(cmd, TargetLocation):
        return "vget /target/location"
    if isinstance(cmd, PlantGet):
        return f"vget /plant/{cmd.var}"
    if isinstance(cmd, PlantSet):
        return f"vset /plant/{cmd.var} {cmd.text}"
    if isinstance(cmd, Possess):
        return f"vset /session/possess {cmd.robot_id}"
    if isinstance(cmd, EnvReset):
        return "vset /env/reset"
    if isinstance(cmd, EnvStep):
        return f"vrun /env/step {cmd.action_id}"
    if isinstance(cmd, SwarmSpawn):
        return f"vrun /swarm/spawn {cmd.n} {cmd.zone}"
    if isinstance(cmd, SimAdvance):
        return f"vrun /sim/advance {cmd.ms}"
    if isinstance(cmd, SimTime):
        return "vget /sim/time"
    raise TypeError(f"not a command: {cmd!r}")
