#!/usr/bin/env python3
"""Drive a robot, download its trace, and plot the path offline.

    python3 examples/plot_trace.py --out walk.png
"""

import argparse
import random

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from npptwin_client import BridgeClient, demo_record


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=9000)
    parser.add_argument("--steps", type=int, default=80)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--csv", default="trace_r1.csv")
    parser.add_argument("--out", default="trace_r1.png")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    actions = [rng.randrange(4) for _ in range(args.steps)]
    with BridgeClient(args.host, args.port) as client:
        rows = demo_record(client, actions, args.csv, robot_id="r1")
    print(f"{len(rows)} trace rows -> {args.csv}")

    xs = [r["x_m"] for r in rows]
    ys = [r["y_m"] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.plot(xs, ys, "-", lw=1.0, color="#4878a8")
    ax.plot(xs[:1], ys[:1], "go", label="start")
    ax.plot(xs[-1:], ys[-1:], "rs", label="end")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal")
    ax.invert_yaxis()  # map rows grow downward
    ax.legend(frameon=False)
    ax.set_title("robot path")
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"path plot -> {args.out}")


if __name__ == "__main__":
    main()
