#!/usr/bin/env python3
"""Random-walk navigation through the remote environment.

Start the services first:

    plantd &
    twind &

then:

    python3 examples/random_walk.py --steps 50
"""

import argparse
import random

from npptwin_client import BridgeClient, RemoteEnv


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=9000)
    parser.add_argument("--steps", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    with BridgeClient(args.host, args.port) as client:
        env = RemoteEnv(client, robot_id="r1")
        obs, info = env.reset()
        print(f"reset: obs {obs.shape}, t={info['t_ms']} ms")
        total = 0.0
        for step in range(args.steps):
            action = rng.randrange(4)
            obs, reward, terminated, truncated, info = env.step(action)
            total += reward
            print(
                f"step {step:3d} action {action} reward {reward:+.3f} "
                f"distance {info['distance_m']:.2f} m"
            )
            if terminated or truncated:
                print("episode over:", "reached" if terminated else "budget")
                break
        print(f"return: {total:+.3f}")


if __name__ == "__main__":
    main()
