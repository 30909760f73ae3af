"""Gym-style episode wrapper over the bridge episode commands.

``reset()`` returns ``(observation, info)`` and ``step(action)`` returns
the standard 5-tuple ``(observation, reward, terminated, truncated,
info)``. The server reports a single ``done`` flag plus the distance to
target; the client splits it into terminated (goal reached, distance
within the goal radius) versus truncated (step budget exhausted) from
its mirror of the environment config.

The client adds no semantics beyond encoding: every number comes from
the wire.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .bridge import BridgeClient
from .images import decode_ppm

ACTIONS = {0: "forward", 1: "backward", 2: "turn_left", 3: "turn_right", 4: "up", 5: "down"}


class EpisodeFinished(RuntimeError):
    """step() after the episode reported done; call reset()."""


class RemoteEnv:
    def __init__(
        self,
        client: BridgeClient,
        robot_id: Optional[str] = None,
        goal_radius_m: float = 0.5,
        max_steps: int = 500,
    ):
        self.client = client
        self.robot_id = robot_id
        self.goal_radius_m = goal_radius_m
        self.max_steps = max_steps
        self.steps = 0
        self._done = True
        self._started = False
        self.last_observation: Optional[np.ndarray] = None

    def reset(self, seed: Optional[int] = None, options: Optional[dict] = None):
        if self.robot_id is not None and not self._started:
            self.client.possess(self.robot_id)
        body = self.client.call("vset /env/reset")
        obs = decode_ppm(body)
        self.steps = 0
        self._done = False
        self._started = True
        self.last_observation = obs
        return obs, {"t_ms": self.client.sim_time_ms()}

    def step(self, action: int):
        if not self._started:
            raise EpisodeFinished("reset() before the first step()")
        if self._done:
            raise EpisodeFinished("episode finished; call reset()")
        if action not in ACTIONS:
            raise ValueError(f"unknown action {action!r}")
        body = self.client.call(f"vrun /env/step {action}")
        head, ppm = body.split(b"P6\n", 1)
        reward_s, done_s, dist_s = head.decode("utf-8").strip().split(" ")
        reward = float(reward_s)
        done = done_s == "1"
        distance = float(dist_s)
        obs = decode_ppm(b"P6\n" + ppm)
        self.steps += 1
        self._done = done
        self.last_observation = obs
        reached = distance <= self.goal_radius_m
        terminated = done and reached
        truncated = done and not reached
        info = {"distance_m": distance, "steps": self.steps, "reward_text": reward_s}
        return obs, reward, terminated, truncated, info

    @property
    def observation_shape(self) -> Optional[tuple[int, int, int]]:
        if self.last_observation is None:
            return None
        return tuple(self.last_observation.shape)
