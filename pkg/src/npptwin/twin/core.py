"""The twin process core: world + renderer + mirror cache + tick loop.

Concurrency model: many sessions dispatch concurrently, but all world
mutation funnels through one place.  Motion commands and environment
steps are queued as work items and applied by the tick loop in arrival
order (at most one motion per robot per tick follows from sessions being
strictly request/response).  Queries, cameras, and the gateway read the
last published immutable snapshot.  Episode resets, possession, trace
toggles, swarm staging, and plant writes apply immediately under the
world lock -- they are bookkeeping, not motion.

In rt mode a wall-clock ticker drives the loop; in lockstep mode time
advances only when an env step or an explicit advance command arrives,
and the plant is advanced in matching increments over the mirror link,
giving bitwise-reproducible runs.
"""

from __future__ import annotations

import logging
import queue
import threading
import time
from concurrent.futures import Future
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from typing import Mapping, Optional

from ..env.episode import EnvConfig, Episode, EpisodeStateError
from ..mirror.client import MirrorCache, MirrorClient, MirrorError, MirrorPoller, refresh_once
from ..render.image import Image, encode_ppm
from ..render.raycast import render_first_person
from ..render.recorder import TopdownRecorder
from ..render.topdown import RobotMarker, render_topdown
from ..world.robots import (
    IllegalActionError,
    PossessionConflictError,
    PossessionRegistry,
    RobotState,
    SwarmCapacityError,
    apply_move,
    compass_bearing,
    spawn_swarm,
)
from ..world.thermal import make_thermal_lookup
from ..world.trace import TRACE_HEADER, TraceLog, format_trace_row
from ..world.worldmap import WorldMap, load_default_map, load_map_file
from . import commands as cmd

log = logging.getLogger(__name__)

MODE_RT = "rt"
MODE_LOCKSTEP = "lockstep"

DEFAULT_ROBOTS = "r1:wheeled:default,d1:aerial:aerial"


@dataclass
class TwinConfig:
    bridge_host: str = "127.0.0.1"
    bridge_port: int = 9000
    http_host: str = "127.0.0.1"
    http_port: int = 8080
    plant_host: str = "127.0.0.1"
    plant_port: int = 9100
    map_path: Optional[str] = None
    tick_ms: int = 50
    mode: str = MODE_RT
    seed: int = 0
    record_dir: Optional[str] = None
    topdown_interval_ms: int = 1000
    poll_ms: int = 100
    assets_dir: Optional[str] = None
    robots: str = DEFAULT_ROBOTS
    env: EnvConfig = field(default_factory=EnvConfig)


@dataclass(frozen=True)
class RobotView:
    id: str
    kind: str
    x_m: float
    y_m: float
    z_m: float
    yaw_deg: float
    trace_enabled: bool
    color: tuple[int, int, int]
    trace_points: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class TwinSnapshot:
    t_ms: int
    robots: Mapping[str, RobotView]
    plant_values: Mapping[str, float]
    plant_stale_ms: int
    plant_sim_time_ms: int


class Session:
    _counter = 0
    _counter_lock = threading.Lock()

    def __init__(self, transport: str):
        with Session._counter_lock:
            Session._counter += 1
            n = Session._counter
        self.id = f"{transport}-{n}"
        self.transport = transport
        self.subscribed = False


@dataclass
class _WorkItem:
    kind: str  # "motion" | "env_step" | "advance"
    session: Session
    payload: object
    future: Future


def _fmt(value: float) -> str:
    return repr(float(value))


def _ok(*parts: str) -> bytes:
    return ("ok " + " ".join(parts)).encode("utf-8") if parts else b"ok"


def _error(code: int, message: str) -> bytes:
    return f"error {code} {message}".encode("utf-8")


class TwinServer:
    def __init__(self, config: TwinConfig, wm: Optional[WorldMap] = None):
        self.config = config
        if wm is not None:
            self.wm = wm
        elif config.map_path:
            self.wm = load_map_file(config.map_path)
        else:
            self.wm = load_default_map()
        self.robots: dict[str, RobotState] = {}
        self._spawn_initial_robots(config.robots)
        self.possessions = PossessionRegistry()
        self.traces = TraceLog(config.record_dir)
        self.cache = MirrorCache()
        self.episodes: dict[str, Episode] = {}
        self.sim_time_ms = 0
        self._lock = threading.RLock()
        self._work: "queue.Queue[_WorkItem]" = queue.Queue()
        self._stop = threading.Event()
        self._tick_thread: Optional[threading.Thread] = None
        self._poller: Optional[MirrorPoller] = None
        self._lockstep_client: Optional[MirrorClient] = None
        self._plant_names: list[str] = []
        self._plant_writable: set[str] = set()
        self._plant_known: set[str] = set()
        self.recorder: Optional[TopdownRecorder] = None
        if config.record_dir:
            self.recorder = TopdownRecorder(
                directory=config.record_dir,
                render=self._render_topdown_live,
                interval_ms=config.topdown_interval_ms,
            )
        self._snapshot = self._build_snapshot_locked()
        self.overruns = 0

    # -- lifecycle -------------------------------------------------------

    def _spawn_initial_robots(self, spec: str) -> None:
        from ..world.robots import ROBOT_COLOR_PALETTE

        for i, part in enumerate(p for p in spec.split(",") if p):
            bits = part.split(":")
            if len(bits) != 3:
                raise ValueError(f"robot spec must be id:kind:spawn, got {part!r}")
            rid, kind, spawn_name = bits
            pose = self.wm.spawns.get(spawn_name) or self.wm.spawns.get("default")
            if pose is None:
                raise ValueError(f"map has no spawn named {spawn_name!r} and no default")
            self.robots[rid] = RobotState(
                id=rid, kind=kind, x_m=pose.x, y_m=pose.y, z_m=pose.z,
                yaw_deg=pose.yaw, color=ROBOT_COLOR_PALETTE[i % len(ROBOT_COLOR_PALETTE)],
            )

    def connect_plant(self, retry_s: float = 10.0) -> None:
        """LIST the plant registry; the twin depends only on the wire grammar."""
        deadline = time.monotonic() + retry_s
        last_exc: Optional[Exception] = None
        while time.monotonic() < deadline:
            try:
                client = MirrorClient(self.config.plant_host, self.config.plant_port).connect()
                descriptors = client.list()
                if self.config.mode == MODE_LOCKSTEP:
                    client.mode(MODE_LOCKSTEP)
                    self._lockstep_client = client
                else:
                    client.close()
                self._plant_names = [d.name for d in descriptors]
                self._plant_known = set(self._plant_names)
                self._plant_writable = {d.name for d in descriptors if d.writable}
                return
            except (OSError, MirrorError) as exc:
                last_exc = exc
                time.sleep(0.1)
        raise ConnectionError(
            f"cannot reach plant at {self.config.plant_host}:{self.config.plant_port}: {last_exc}"
        )

    def start(self) -> None:
        self.connect_plant()
        if self.config.mode == MODE_RT:
            self._poller = MirrorPoller(
                self.cache,
                self._plant_names,
                host=self.config.plant_host,
                port=self.config.plant_port,
                period_ms=self.config.poll_ms,
            ).start()
            self._tick_thread = threading.Thread(
                target=self._run_rt, name="twin-ticker", daemon=True
            )
        else:
            # Lockstep: synchronous refresh so generation 0 exists.
            refresh_once(self._lockstep_client, self.cache, self._plant_names)
            self._tick_thread = threading.Thread(
                target=self._run_lockstep, name="twin-lockstep", daemon=True
            )
        self._tick_thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._tick_thread is not None:
            self._tick_thread.join(timeout=2.0)
        if self._poller is not None:
            self._poller.stop()
        if self._lockstep_client is not None:
            self._lockstep_client.close()
        self.traces.close()

    # -- snapshots ---------------------------------------------------------

    @property
    def snapshot(self) -> TwinSnapshot:
        return self._snapshot

    def _build_snapshot_locked(self) -> TwinSnapshot:
        views = {}
        for rid, r in self.robots.items():
            points = self.traces.points(rid) if r.trace_enabled else []
            views[rid] = RobotView(
                id=rid, kind=r.kind, x_m=r.x_m, y_m=r.y_m, z_m=r.z_m,
                yaw_deg=r.yaw_deg, trace_enabled=r.trace_enabled,
                color=r.color, trace_points=tuple(points),
            )
        gen = self.cache.generation
        return TwinSnapshot(
            t_ms=self.sim_time_ms,
            robots=views,
            plant_values=gen.values,
            plant_stale_ms=self.cache.staleness_ms,
            plant_sim_time_ms=gen.sim_time_ms,
        )

    def _publish_locked(self) -> None:
        self._snapshot = self._build_snapshot_locked()

    # -- tick loop ---------------------------------------------------------

    def _drain(self) -> list[_WorkItem]:
        items = []
        while True:
            try:
                items.append(self._work.get_nowait())
            except queue.Empty:
                return items

    def _run_rt(self) -> None:
        period = self.config.tick_ms / 1000.0
        next_due = time.monotonic() + period
        while not self._stop.is_set():
            delay = next_due - time.monotonic()
            if delay > 0:
                if self._stop.wait(delay):
                    break
            started = time.monotonic()
            self._tick(self._drain())
            next_due += period
            if time.monotonic() - started > period:
                self.overruns += 1
                log.warning("tick overran %.1f ms budget", self.config.tick_ms)
                next_due = time.monotonic()

    def _run_lockstep(self) -> None:
        pending_motions: list[_WorkItem] = []
        while not self._stop.is_set():
            try:
                item = self._work.get(timeout=0.1)
            except queue.Empty:
                continue
            batch = [item] + self._drain()
            for it in batch:
                if it.kind == "motion":
                    pending_motions.append(it)
                elif it.kind == "env_step":
                    self._tick(pending_motions + [it])
                    pending_motions = []
                elif it.kind == "advance":
                    ms = int(it.payload)
                    whole, rem = divmod(ms, self.config.tick_ms)
                    for k in range(whole):
                        self._tick(pending_motions)
                        pending_motions = []
                    if rem:
                        self._tick(pending_motions, dt_ms=rem)
                        pending_motions = []
                    it.future.set_result(_ok(str(self.sim_time_ms)))

    def _advance_plant_locked(self, dt_ms: int) -> None:
        client = self._lockstep_client
        if client is None:
            return
        try:
            client.advance(dt_ms)
            refresh_once(client, self.cache, self._plant_names)
        except (OSError, MirrorError) as exc:
            log.warning("lockstep plant advance failed: %s", exc)
            self.cache.stale = True

    def _tick(self, items: list[_WorkItem], dt_ms: Optional[int] = None) -> None:
        dt = self.config.tick_ms if dt_ms is None else dt_ms
        with self._lock:
            results: list[tuple[Future, object]] = []
            for item in items:
                # One bad command must never take the tick loop down.
                try:
                    results.append((item.future, self._apply_item_locked(item)))
                except Exception:
                    log.exception("work item %s failed", item.kind)
                    results.append((item.future, _error(500, "internal error")))
            self.sim_time_ms += dt
            if self.config.mode == MODE_LOCKSTEP:
                self._advance_plant_locked(dt)
            for robot in self.robots.values():
                self.traces.record(robot, self.sim_time_ms)
            if self.recorder is not None:
                self.recorder.on_tick(self.sim_time_ms)
            self._publish_locked()
        for future, body in results:
            if not future.done():
                future.set_result(body)

    def _apply_item_locked(self, item: _WorkItem) -> bytes:
        if item.kind == "motion":
            rid, action = item.payload
            robot = self.robots.get(rid)
            if robot is None:
                return _error(404, f"robot {rid}")
            try:
                collided = apply_move(robot, action, self.wm)
            except IllegalActionError as exc:
                return _error(400, str(exc))
            return _ok(
                _fmt(robot.x_m), _fmt(robot.y_m), _fmt(robot.z_m),
                "1" if collided else "0",
            )
        if item.kind == "env_step":
            return self._env_step_locked(item)
        return _error(500, f"unhandled work item {item.kind}")

    def _env_step_locked(self, item: _WorkItem) -> bytes:
        session, action_id = item.payload
        episode = self._episode_for(session)
        if episode is None:
            return _error(404, "no robot to step")
        try:
            result = episode.step(action_id)
        except EpisodeStateError as exc:
            return _error(409, str(exc))
        except IllegalActionError as exc:
            return _error(400, str(exc))
        head = (
            f"ok {result.reward!r} {1 if result.done else 0} "
            f"{result.info['distance_m']!r} "
        ).encode("utf-8")
        return head + encode_ppm(result.observation)

    # -- rendering ---------------------------------------------------------

    def _thermal_lookup_from(self, values: Mapping[str, float]):
        return make_thermal_lookup(self.wm, values)

    def _render_topdown_live(self) -> Image:
        markers = [
            RobotMarker(
                r.id, r.x_m, r.y_m, r.yaw_deg, r.color,
                trace=self.traces.points(r.id) if r.trace_enabled else (),
            )
            for r in self.robots.values()
        ]
        return render_topdown(
            self.wm, "lit", robots=markers,
        )

    def render_topdown_snapshot(self, mode: str) -> Image:
        snap = self._snapshot
        markers = [
            RobotMarker(v.id, v.x_m, v.y_m, v.yaw_deg, v.color, trace=v.trace_points)
            for v in snap.robots.values()
        ]
        return render_topdown(
            self.wm, mode, robots=markers,
            thermal_lookup=self._thermal_lookup_from(snap.plant_values),
        )

    def render_camera_snapshot(self, view: RobotView, mode: str, w: int, h: int) -> Image:
        snap = self._snapshot
        return render_first_person(
            self.wm, view.x_m, view.y_m, view.yaw_deg, mode, w, h,
            thermal_lookup=self._thermal_lookup_from(snap.plant_values),
        )

    def _render_for_episode(self, robot: RobotState, mode: str, w: int, h: int) -> Image:
        # Called under the world lock: live poses match the tick being built.
        return render_first_person(
            self.wm, robot.x_m, robot.y_m, robot.yaw_deg, mode, w, h,
            thermal_lookup=self._thermal_lookup_from(self.cache.values),
        )

    # -- episodes ----------------------------------------------------------

    def _episode_for(self, session: Session) -> Optional[Episode]:
        rid = self.possessions.robot_of(session.id) or self.config.env.robot_id
        robot = self.robots.get(rid)
        if robot is None:
            return None
        episode = self.episodes.get(rid)
        if episode is None:
            config = EnvConfig(
                robot_id=rid,
                goal_radius_m=self.config.env.goal_radius_m,
                max_steps=self.config.env.max_steps,
                step_penalty=self.config.env.step_penalty,
                collision_penalty=self.config.env.collision_penalty,
                terminal_bonus=self.config.env.terminal_bonus,
                obs_width=self.config.env.obs_width,
                obs_height=self.config.env.obs_height,
                obs_mode=self.config.env.obs_mode,
            )
            episode = Episode(
                config, robot, self.wm, self._render_for_episode,
                on_reset=lambda rid=rid: self._on_episode_reset(rid),
            )
            self.episodes[rid] = episode
        return episode

    def _on_episode_reset(self, robot_id: str) -> None:
        robot = self.robots[robot_id]
        if robot.trace_enabled:
            self.traces.truncate(robot_id)

    # -- dispatch ------------------------------------------------------------

    def dispatch(self, session: Session, body: str) -> bytes:
        try:
            command = cmd.parse_command(body)
        except cmd.CommandError as exc:
            return _error(400, exc.message)
        return self.dispatch_command(session, command)

    def dispatch_command(self, session: Session, command) -> bytes:
        if isinstance(command, (cmd.Move, cmd.Rotate, cmd.Altitude)):
            return self._dispatch_motion(session, command)
        if isinstance(command, cmd.EnvStep):
            future: Future = Future()
            self._work.put(_WorkItem("env_step", session, (session, command.action_id), future))
            return self._await(future)
        if isinstance(command, cmd.SimAdvance):
            if self.config.mode != MODE_LOCKSTEP:
                return _error(409, "advance is lockstep-only")
            future = Future()
            self._work.put(_WorkItem("advance", session, command.ms, future))
            return self._await(future)
        if isinstance(command, cmd.RobotQuery):
            return self._dispatch_robot_query(command)
        if isinstance(command, cmd.Camera):
            view = self._snapshot.robots.get(command.robot_id)
            if view is None:
                return _error(404, f"robot {command.robot_id}")
            if command.width < 1 or command.height < 1:
                return _error(400, "camera dimensions must be >= 1")
            img = self.render_camera_snapshot(view, command.mode, command.width, command.height)
            return b"ok " + encode_ppm(img)
        if isinstance(command, cmd.Topdown):
            return b"ok " + encode_ppm(self.render_topdown_snapshot(command.mode))
        if isinstance(command, cmd.TargetLocation):
            t = self.wm.target
            return _ok(_fmt(t.x), _fmt(t.y), _fmt(0.0))
        if isinstance(command, cmd.PlantGet):
            if command.var not in self._plant_known:
                return _error(404, f"plant variable {command.var}")
            value = self.cache.values.get(command.var)
            if value is None:
                return _error(409, "plant cache not primed yet")
            return _ok(_fmt(value), str(self.cache.staleness_ms))
        if isinstance(command, cmd.PlantSet):
            if command.var not in self._plant_known:
                return _error(404, f"plant variable {command.var}")
            if command.var not in self._plant_writable:
                return _error(403, f"plant variable {command.var} is read-only")
            self.cache.write(command.var, command.value)
            if self.config.mode == MODE_LOCKSTEP:
                # No poller in lockstep: flush on the spot.
                with self._lock:
                    try:
                        refresh_once(self._lockstep_client, self.cache, self._plant_names)
                    except (OSError, MirrorError) as exc:
                        log.warning("lockstep write flush failed: %s", exc)
            return _ok(command.text)
        if isinstance(command, cmd.Possess):
            if command.robot_id not in self.robots:
                return _error(404, f"robot {command.robot_id}")
            try:
                with self._lock:
                    self.possessions.possess(session.id, command.robot_id)
                    for rid, robot in self.robots.items():
                        robot.possessed_by = self.possessions.owner(rid)
            except PossessionConflictError as exc:
                return _error(409, str(exc))
            return _ok(command.robot_id)
        if isinstance(command, cmd.TraceSet):
            robot = self.robots.get(command.robot_id)
            if robot is None:
                return _error(404, f"robot {command.robot_id}")
            with self._lock:
                robot.trace_enabled = command.enabled
                self._publish_locked()
            return _ok("on" if command.enabled else "off")
        if isinstance(command, cmd.EnvReset):
            with self._lock:
                episode = self._episode_for(session)
                if episode is None:
                    return _error(404, "no robot to reset")
                obs = episode.reset()
                self._publish_locked()
            return b"ok " + encode_ppm(obs)
        if isinstance(command, cmd.SwarmSpawn):
            try:
                with self._lock:
                    robots = spawn_swarm(self.wm, command.n, command.zone, seed=self.config.seed)
                    for robot in robots:
                        self.robots[robot.id] = robot
                    self._publish_locked()
            except SwarmCapacityError as exc:
                return _error(409, str(exc))
            return _ok(*(r.id for r in robots))
        if isinstance(command, cmd.SimTime):
            return _ok(str(self._snapshot.t_ms))
        return _error(400, "unhandled command")

    def _dispatch_motion(self, session: Session, command) -> bytes:
        rid = command.robot_id
        if rid not in self.robots:
            return _error(404, f"robot {rid}")
        owner = self.possessions.owner(rid)
        if owner != session.id:
            return _error(403, f"robot {rid} not possessed by this session")
        if isinstance(command, cmd.Move):
            action = command.direction
        elif isinstance(command, cmd.Rotate):
            action = "turn_left" if command.direction == "left" else "turn_right"
        else:
            action = command.direction  # up | down
        future: Future = Future()
        self._work.put(_WorkItem("motion", session, (rid, action), future))
        return self._await(future)

    def _await(self, future: Future) -> bytes:
        # In lockstep a queued item only resolves on the next step/advance;
        # the timeout turns an abandoned queue into an error, not a hang.
        try:
            return future.result(timeout=60.0)
        except FutureTimeout:
            return _error(409, "no tick arrived to apply this command (lockstep idle?)")

    def _dispatch_robot_query(self, command: cmd.RobotQuery) -> bytes:
        view = self._snapshot.robots.get(command.robot_id)
        if view is None:
            return _error(404, f"robot {command.robot_id}")
        if command.what == "location":
            return _ok(_fmt(view.x_m), _fmt(view.y_m), _fmt(view.z_m))
        if command.what == "rotation":
            return _ok(_fmt(view.yaw_deg))
        if command.what == "compass":
            robot = RobotState(
                id=view.id, kind=view.kind, x_m=view.x_m, y_m=view.y_m,
                z_m=view.z_m, yaw_deg=view.yaw_deg,
            )
            bearing = compass_bearing(robot, self.wm.target.x, self.wm.target.y)
            return _ok(_fmt(bearing))
        if command.what == "trace":
            rows = self.traces.rows(command.robot_id)
            csv = TRACE_HEADER + "\n" + "".join(format_trace_row(r) + "\n" for r in rows)
            return b"ok " + csv.encode("utf-8")
        return _error(400, f"unknown query {command.what}")

    def release_session(self, session: Session) -> None:
        with self._lock:
            released = self.possessions.release_session(session.id)
            if released is not None and released in self.robots:
                self.robots[released].possessed_by = None
