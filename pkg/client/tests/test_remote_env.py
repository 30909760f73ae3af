"""Remote environment: 5-tuple contract, reward fidelity, determinism."""

import random
import socket
import struct

import pytest

from npptwin.launch import ServicePair

from npptwin_client import BridgeClient, EpisodeFinished, RemoteEnv


def scripted_actions(seed, n):
    rng = random.Random(seed)
    return [rng.randrange(4) for _ in range(n)]


def raw_reward_texts(port, actions):
    """The same episode via hand-rolled frames: the bridge-level truth."""
    sock = socket.create_connection(("127.0.0.1", port), timeout=15.0)
    buf = bytearray()

    def request(i, body):
        payload = f"{i}:{body}".encode()
        sock.sendall(struct.pack("<I", len(payload)) + payload)
        while True:
            if len(buf) >= 4:
                (length,) = struct.unpack_from("<I", buf)
                if len(buf) >= 4 + length:
                    frame = bytes(buf[4 : 4 + length])
                    del buf[: 4 + length]
                    return frame.split(b":", 1)[1]
            chunk = sock.recv(262144)
            if not chunk:
                raise ConnectionError("closed")
            buf.extend(chunk)

    request(1, "vset /session/possess r1")
    request(2, "vset /env/reset")
    texts = []
    for k, action in enumerate(actions):
        body = request(3 + k, f"vrun /env/step {action}")
        assert body.startswith(b"ok ")
        head = body[3:].split(b"P6\n", 1)[0]
        texts.append(head.decode().strip().split(" ")[0])
    sock.close()
    return texts


class TestFiveTuple:
    def test_reset_and_step_shapes(self, rt_services):
        with BridgeClient(port=rt_services.bridge_port) as client:
            env = RemoteEnv(client, robot_id="r1")
            obs, info = env.reset()
            assert obs.shape == (144, 256, 3)
            assert "t_ms" in info
            out = env.step(2)
            assert len(out) == 5
            obs, reward, terminated, truncated, info = out
            assert obs.shape == (144, 256, 3)
            assert isinstance(reward, float)
            assert isinstance(terminated, bool) and isinstance(truncated, bool)
            assert info["steps"] == 1

    def test_step_before_reset_raises(self, rt_services):
        with BridgeClient(port=rt_services.bridge_port) as client:
            env = RemoteEnv(client, robot_id="r1")
            with pytest.raises(EpisodeFinished):
                env.step(0)

    def test_truncation_on_budget(self):
        with ServicePair(
            mode="rt", plant_tick_ms=20, twin_tick_ms=20, poll_ms=40, env_max_steps=3
        ) as services:
            with BridgeClient(port=services.bridge_port) as client:
                env = RemoteEnv(client, robot_id="r1", max_steps=3)
                env.reset()
                env.step(2)
                env.step(2)
                obs, reward, terminated, truncated, info = env.step(2)
                assert truncated and not terminated
                with pytest.raises(EpisodeFinished):
                    env.step(2)


class TestRewardFidelity:
    def test_hundred_step_episode_matches_bridge_rewards_bitwise(self):
        actions = scripted_actions(seed=77, n=100)
        # Run 1: raw frames against a fresh lockstep stack.
        with ServicePair(mode="lockstep", plant_tick_ms=50, twin_tick_ms=50) as services:
            raw_texts = raw_reward_texts(services.bridge_port, actions)
        # Run 2: the SDK against another fresh lockstep stack.
        with ServicePair(mode="lockstep", plant_tick_ms=50, twin_tick_ms=50) as services:
            with BridgeClient(port=services.bridge_port, timeout=30.0) as client:
                env = RemoteEnv(client, robot_id="r1")
                env.reset()
                sdk_texts = []
                for action in actions:
                    _, reward, terminated, truncated, info = env.step(action)
                    sdk_texts.append(info["reward_text"])
                    assert float(info["reward_text"]) == reward
                    if terminated or truncated:
                        env.reset()
        assert sdk_texts == raw_texts

    def test_telescoping_sum_over_script(self, rt_services):
        with BridgeClient(port=rt_services.bridge_port) as client:
            env = RemoteEnv(client, robot_id="r1")
            env.reset()
            dists = []
            rewards = []
            for action in (2, 2, 3, 2):  # pure turns: distance frozen
                _, reward, terminated, truncated, info = env.step(action)
                rewards.append(reward)
                dists.append(info["distance_m"])
            assert len(set(dists)) == 1
            assert sum(rewards) == pytest.approx(-0.01 * 4, abs=1e-9)
