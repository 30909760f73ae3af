"""Step/reset episode semantics over one robot.

Reward is potential-difference shaping on the horizontal distance to
the fixed map target, minus small step/collision penalties, plus a
terminal bonus:

    reward = (d_prev - d_cur) - step_penalty
             - collision_penalty * collided + terminal_bonus * reached

so over any collision-free, non-terminal trajectory the rewards
telescope to (d_0 - d_k) - step_penalty * k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..render.image import Image
from ..world.robots import RobotState, apply_move, compass_bearing
from ..world.worldmap import WorldMap

ACTION_NAMES = {
    0: "forward",
    1: "backward",
    2: "turn_left",
    3: "turn_right",
    4: "up",
    5: "down",
}


class EpisodeStateError(RuntimeError):
    """Step before reset, or step after the episode finished."""


@dataclass(frozen=True)
class EnvConfig:
    robot_id: str = "r1"
    goal_radius_m: float = 0.5
    max_steps: int = 500
    step_penalty: float = 0.01
    collision_penalty: float = 0.05
    terminal_bonus: float = 1.0
    obs_width: int = 256
    obs_height: int = 144
    obs_mode: str = "lit"

    def __post_init__(self) -> None:
        if self.goal_radius_m <= 0:
            raise ValueError("goal_radius_m must be > 0")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.step_penalty < 0 or self.collision_penalty < 0:
            raise ValueError("penalties must be >= 0")
        if self.obs_mode not in ("lit", "thermal"):
            raise ValueError(f"obs_mode must be lit or thermal, got {self.obs_mode!r}")


@dataclass(frozen=True)
class StepResult:
    observation: Image
    reward: float
    done: bool
    info: dict = field(default_factory=dict)


def reward(
    d_prev: float,
    d_cur: float,
    collided: bool,
    reached: bool,
    config: EnvConfig = EnvConfig(),
) -> float:
    r = (d_prev - d_cur) - config.step_penalty
    if collided:
        r -= config.collision_penalty
    if reached:
        r += config.terminal_bonus
    return r


class Episode:
    """One robot bound to one episodic task on a fixed map target.

    The caller supplies ``render`` and optionally ``on_reset``/``on_step``
    hooks so the twin can truncate trace logs and advance its clock; the
    episode itself owns only the counters and the reward algebra.
    """

    def __init__(
        self,
        config: EnvConfig,
        robot: RobotState,
        wm: WorldMap,
        render: Callable[[RobotState, str, int, int], Image],
        on_reset: Optional[Callable[[], None]] = None,
    ):
        self.config = config
        self.robot = robot
        self.wm = wm
        self._render = render
        self._on_reset = on_reset
        self.steps = 0
        self.done = False
        self.started = False

    # -- helpers ---------------------------------------------------------

    def distance_to_target(self) -> float:
        return math.hypot(
            self.wm.target.x - self.robot.x_m, self.wm.target.y - self.robot.y_m
        )

    def observe(self) -> Image:
        return self._render(
            self.robot, self.config.obs_mode, self.config.obs_width, self.config.obs_height
        )

    # -- episode surface --------------------------------------------------

    def reset(self) -> Image:
        self.robot.teleport_to_spawn()
        self.steps = 0
        self.done = False
        self.started = True
        if self._on_reset is not None:
            self._on_reset()
        return self.observe()

    def step(self, action_id: int) -> StepResult:
        if not self.started:
            raise EpisodeStateError("reset required before stepping")
        if self.done:
            raise EpisodeStateError("episode finished; reset required")
        name = ACTION_NAMES.get(action_id)
        if name is None:
            raise EpisodeStateError(f"unknown action id {action_id}")
        d_prev = self.distance_to_target()
        collided = apply_move(self.robot, name, self.wm)
        d_cur = self.distance_to_target()
        reached = d_cur <= self.config.goal_radius_m
        self.steps += 1
        self.done = reached or self.steps >= self.config.max_steps
        r = reward(d_prev, d_cur, collided, reached, self.config)
        obs = self.observe()
        return StepResult(
            observation=obs,
            reward=r,
            done=self.done,
            info={
                "distance_m": d_cur,
                "collided": collided,
                "steps": self.steps,
                "bearing_deg": compass_bearing(self.robot, self.wm.target.x, self.wm.target.y),
                "reached": reached,
            },
        )
