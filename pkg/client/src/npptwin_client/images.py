"""PPM decoding into numpy arrays."""

from __future__ import annotations

import numpy as np


def decode_ppm(data: bytes) -> np.ndarray:
    """Binary PPM (P6, maxval 255) to an (h, w, 3) uint8 array."""
    if not data.startswith(b"P6"):
        raise ValueError("not a P6 PPM stream")
    pos = 2
    tokens = []
    while len(tokens) < 3:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError("truncated PPM header")
        tokens.append(data[start:pos])
    pos += 1  # the single whitespace byte after maxval
    width, height, maxval = (int(t) for t in tokens)
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    need = 3 * width * height
    raw = data[pos : pos + need]
    if len(raw) != need:
        raise ValueError(f"expected {need} pixel bytes, got {len(raw)}")
    return np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3).copy()


def get_camera(client, robot_id: str, mode: str, width: int, height: int) -> np.ndarray:
    """First-person frame as an (h, w, 3) uint8 array."""
    return decode_ppm(client.camera_bytes(robot_id, mode, width, height))
