"""The eight profiled operations, shared by the speed and functional
suites.  Each operation carries a postcondition asserted on every run:
the functional protocol checks behavior, not just absence of crashes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from ..mirror.client import MirrorClient
from ..plant.registry import build_registry
from ..render.image import decode_ppm
from ..twin.bridge import BridgeConnection

OBS_W, OBS_H = 256, 144

# 100 distinct names for the batched read: all 96 probes + 4 physicals.
MGET_BATCH = [f"probe_{i:02d}_c" for i in range(96)] + [
    "core_power_mw",
    "t_avg_c",
    "p_sg_mpa",
    "gen_power_mwe",
]
# 100 distinct writable names for the batched write.
MSET_BATCH = [f"aux_{i:02d}" for i in range(100)]

_RANGES = {d.name: (d.min, d.max) for d in build_registry()}


class PostconditionError(AssertionError):
    pass


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise PostconditionError(message)


@dataclass
class BenchContext:
    """Open connections to one plant + twin pair."""

    plant_host: str
    plant_port: int
    twin_host: str
    twin_port: int
    mirror: Optional[MirrorClient] = None
    bridge: Optional[BridgeConnection] = None
    rng: random.Random = None

    def open(self) -> "BenchContext":
        self.mirror = MirrorClient(self.plant_host, self.plant_port).connect()
        self.bridge = BridgeConnection(self.twin_host, self.twin_port).connect()
        self.rng = random.Random(1234)
        # Sessions own r1 for motion/episode operations.
        status, rest = self.bridge.request("vset /session/possess r1")
        _check(status == "ok", f"cannot possess r1: {rest[:80]!r}")
        status, _ = self.bridge.request("vset /env/reset")
        _check(status == "ok", "cannot reset the episode")
        return self

    def close(self) -> None:
        if self.mirror is not None:
            self.mirror.close()
        if self.bridge is not None:
            self.bridge.close()


def op_mirror_set(ctx: BenchContext) -> None:
    value = round(ctx.rng.random(), 6)
    applied = ctx.mirror.mset([(name, value) for name in MSET_BATCH])
    _check(len(applied) == len(MSET_BATCH), f"expected {len(MSET_BATCH)} echoes")
    _check(all(0.0 <= v <= 1.0 for v in applied), "echo outside the aux range")


def op_mirror_get(ctx: BenchContext) -> None:
    values = ctx.mirror.mget(MGET_BATCH)
    _check(len(values) == len(MGET_BATCH), f"expected {len(MGET_BATCH)} values")
    for name, value in zip(MGET_BATCH, values):
        lo, hi = _RANGES[name]
        _check(lo <= value <= hi, f"{name}={value} outside [{lo}, {hi}]")


def op_camera(ctx: BenchContext) -> None:
    status, body = ctx.bridge.request(f"vget /camera/r1/lit {OBS_W} {OBS_H}")
    _check(status == "ok", f"camera failed: {body[:80]!r}")
    img = decode_ppm(body)
    _check((img.width, img.height) == (OBS_W, OBS_H), "camera dimensions wrong")


def op_env_step(ctx: BenchContext) -> None:
    action = ctx.rng.randrange(4)
    status, body = ctx.bridge.request(f"vrun /env/step {action}")
    _check(status == "ok", f"step failed: {body[:80]!r}")
    head, ppm = body.split(b"P6\n", 1)
    reward_s, done_s, dist_s = head.decode().strip().split(" ")
    float(reward_s)
    _check(done_s in ("0", "1"), "done flag malformed")
    _check(float(dist_s) >= 0.0, "distance must be non-negative")
    img = decode_ppm(b"P6\n" + ppm)
    _check((img.width, img.height) == (OBS_W, OBS_H), "observation dimensions wrong")
    if done_s == "1":
        # Episode boundary bookkeeping happens outside the timed window.
        ctx.bridge.request("vset /env/reset")


def op_env_reset(ctx: BenchContext) -> None:
    status, body = ctx.bridge.request("vset /env/reset")
    _check(status == "ok", f"reset failed: {body[:80]!r}")
    img = decode_ppm(body)
    _check((img.width, img.height) == (OBS_W, OBS_H), "reset observation wrong size")


def op_move(ctx: BenchContext) -> None:
    command = ctx.rng.choice(
        [
            "vset /robot/r1/move forward",
            "vset /robot/r1/move backward",
            "vset /robot/r1/rotate left",
            "vset /robot/r1/rotate right",
        ]
    )
    status, body = ctx.bridge.request(command)
    _check(status == "ok", f"move failed: {body[:80]!r}")
    parts = body.decode().split(" ")
    _check(len(parts) == 4 and parts[3] in ("0", "1"), "move response malformed")


def op_thermal_topdown(ctx: BenchContext) -> None:
    status, body = ctx.bridge.request("vget /topdown thermal")
    _check(status == "ok", f"thermal topdown failed: {body[:80]!r}")
    img = decode_ppm(body)
    _check(img.width >= 1 and img.height >= 1, "empty thermal image")


def op_topdown_capture(ctx: BenchContext) -> None:
    status, body = ctx.bridge.request("vget /topdown lit")
    _check(status == "ok", f"topdown failed: {body[:80]!r}")
    _check(body.startswith(b"P6\n"), "topdown payload is not PPM")


@dataclass(frozen=True)
class Operation:
    name: str
    run: Callable[[BenchContext], None]
    # Speed-suite special handling; the topdown run inserts configured
    # inter-capture delays which are subtracted from its totals.
    delayed_capture: bool = False


OPERATIONS = (
    Operation("mirror_set_100", op_mirror_set),
    Operation("mirror_get_100", op_mirror_get),
    Operation("bridge_read_image", op_camera),
    Operation("bridge_env_step", op_env_step),
    Operation("bridge_env_reset", op_env_reset),
    Operation("bridge_move_2d", op_move),
    Operation("thermal_topdown", op_thermal_topdown),
    Operation("topdown_capture_run", op_topdown_capture, delayed_capture=True),
)

OPERATION_NAMES = tuple(op.name for op in OPERATIONS)
