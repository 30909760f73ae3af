"""Drive a robot through a scripted action list and download its trace
CSV for offline plotting or demonstration datasets."""

from __future__ import annotations

from typing import Sequence

from .bridge import BridgeClient
from .env import ACTIONS


def demo_record(
    client: BridgeClient,
    actions: Sequence[int],
    csv_path: str,
    robot_id: str = "r1",
) -> list[dict]:
    """Possess, trace, drive, download; returns the parsed rows.

    The downloaded bytes are written to ``csv_path`` verbatim, so the
    file matches the server-side trace byte for byte.
    """
    client.possess(robot_id)
    client.set_trace(robot_id, True)
    try:
        for action in actions:
            name = ACTIONS.get(action)
            if name is None:
                raise ValueError(f"unknown action {action!r}")
            if name in ("forward", "backward"):
                client.move(robot_id, name)
            elif name in ("turn_left", "turn_right"):
                client.rotate(robot_id, "left" if name == "turn_left" else "right")
            else:
                client.call(f"vset /robot/{robot_id}/altitude {name}")
    finally:
        client.set_trace(robot_id, False)
    raw = client.download_trace(robot_id)
    with open(csv_path, "wb") as fh:
        fh.write(raw)
    lines = raw.decode("utf-8").strip().split("\n")
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        values = line.split(",")
        row = dict(zip(header, values))
        for key in ("x_m", "y_m", "z_m", "yaw_deg"):
            row[key] = float(row[key])
        row["t_ms"] = int(row["t_ms"])
        rows.append(row)
    return rows
