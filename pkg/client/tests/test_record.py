"""Trace recording via the SDK: row shape and server-file fidelity."""

import random

import pytest

from npptwin.launch import ServicePair

from npptwin_client import BridgeClient, demo_record


def test_demo_record_rows_and_header(tmp_path, rt_services):
    csv_path = tmp_path / "walk.csv"
    actions = [0, 2, 0, 3, 1, 0]
    with BridgeClient(port=rt_services.bridge_port) as client:
        rows = demo_record(client, actions, str(csv_path), robot_id="r1")
    content = csv_path.read_text()
    lines = content.strip().split("\n")
    assert lines[0] == "t_ms,robot_id,x_m,y_m,z_m,yaw_deg"
    assert len(rows) == len(lines) - 1
    assert len(rows) >= 1
    t = [r["t_ms"] for r in rows]
    assert t == sorted(t)


def test_downloaded_trace_matches_server_file(tmp_path):
    record_dir = tmp_path / "rec"
    with ServicePair(
        mode="rt", plant_tick_ms=20, twin_tick_ms=20, poll_ms=40,
        record_dir=str(record_dir),
    ) as services:
        csv_path = tmp_path / "download.csv"
        rng = random.Random(3)
        actions = [rng.randrange(4) for _ in range(20)]
        with BridgeClient(port=services.bridge_port) as client:
            rows = demo_record(client, actions, str(csv_path), robot_id="r1")
            # Final pose in the trace matches the live robot pose.
            x, y, z = client.location("r1")
            assert rows[-1]["x_m"] == pytest.approx(x, abs=5e-4)
            assert rows[-1]["y_m"] == pytest.approx(y, abs=5e-4)
        server_file = record_dir / "trace_r1.csv"
        assert server_file.read_bytes() == csv_path.read_bytes()
