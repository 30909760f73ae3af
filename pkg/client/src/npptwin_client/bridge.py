"""Thin client for the framed twin bridge protocol.

Wire format (see the server's docs/bridge-protocol.md): frames are a
u32 little-endian payload length followed by ``<id>:<body>`` where the
id is decimal digits echoed back verbatim. This client is synchronous
with a single in-flight request, which matches the polling style of the
protocol and keeps the SDK trivial to port.
"""

from __future__ import annotations

import socket
import struct
from typing import Optional

_HEADER = struct.Struct("<I")
MAX_FRAME_BYTES = 16 * 1024 * 1024
DEFAULT_TIMEOUT_S = 10.0


class BridgeError(RuntimeError):
    """Transport-level failure: timeout, reset, or malformed frame."""


class CommandFailed(RuntimeError):
    """Server answered ``error <code> <detail>``."""

    def __init__(self, detail: str):
        super().__init__(detail)
        code, _, message = detail.partition(" ")
        try:
            self.code = int(code)
        except ValueError:
            self.code = 0
        self.detail = message


class BridgeClient:
    """One connection, strictly one request in flight at a time."""

    def __init__(self, host: str = "127.0.0.1", port: int = 9000,
                 timeout: float = DEFAULT_TIMEOUT_S):
        self.host = host
        self.port = port
        self.timeout = timeout
        self._sock: Optional[socket.socket] = None
        self._buf = bytearray()
        self._next_id = 0

    def connect(self) -> "BridgeClient":
        sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._sock = sock
        return self

    def close(self) -> None:
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
            self._sock = None

    def __enter__(self) -> "BridgeClient":
        return self.connect()

    def __exit__(self, *exc) -> None:
        self.close()

    # -- core ------------------------------------------------------------

    def request(self, cmd: str, timeout: Optional[float] = None) -> tuple[str, bytes]:
        """Send one command body; returns (status, payload-after-status).

        status is "ok" or "error". Raises BridgeError on transport
        trouble, including a response id that does not echo the request.
        """
        if self._sock is None:
            raise BridgeError("not connected")
        self._next_id += 1
        request_id = str(self._next_id).encode("ascii")
        payload = request_id + b":" + cmd.encode("utf-8")
        self._sock.settimeout(timeout if timeout is not None else self.timeout)
        try:
            self._sock.sendall(_HEADER.pack(len(payload)) + payload)
            response = self._read_frame()
        except socket.timeout as exc:
            raise BridgeError(f"timeout waiting for response to {cmd!r}") from exc
        except OSError as exc:
            raise BridgeError(f"connection failed during {cmd!r}: {exc}") from exc
        colon = response.find(b":")
        if colon < 1 or not response[:colon].isdigit():
            raise BridgeError(f"malformed response frame {response[:40]!r}")
        if response[:colon] != request_id:
            raise BridgeError(
                f"response id {response[:colon]!r} does not echo request {request_id!r}"
            )
        body = response[colon + 1 :]
        if body == b"ok" or body.startswith(b"ok "):
            return "ok", body[3:]
        if body.startswith(b"error "):
            return "error", body[6:]
        raise BridgeError(f"unrecognized response body {body[:40]!r}")

    def call(self, cmd: str, timeout: Optional[float] = None) -> bytes:
        """request() that raises CommandFailed on error responses."""
        status, body = self.request(cmd, timeout=timeout)
        if status != "ok":
            raise CommandFailed(body.decode("utf-8", errors="replace"))
        return body

    def _read_frame(self) -> bytes:
        while True:
            if len(self._buf) >= 4:
                (length,) = _HEADER.unpack_from(self._buf)
                if length > MAX_FRAME_BYTES:
                    raise BridgeError(f"frame of {length} bytes exceeds 16 MiB")
                if len(self._buf) >= 4 + length:
                    payload = bytes(self._buf[4 : 4 + length])
                    del self._buf[: 4 + length]
                    return payload
            chunk = self._sock.recv(256 * 1024)
            if not chunk:
                raise BridgeError("connection reset by bridge")
            self._buf.extend(chunk)

    # -- convenience wrappers ---------------------------------------------

    def sim_time_ms(self) -> int:
        return int(self.call("vget /sim/time"))

    def possess(self, robot_id: str) -> None:
        self.call(f"vset /session/possess {robot_id}")

    def location(self, robot_id: str) -> tuple[float, float, float]:
        x, y, z = self.call(f"vget /robot/{robot_id}/location").split(b" ")
        return float(x), float(y), float(z)

    def rotation(self, robot_id: str) -> float:
        return float(self.call(f"vget /robot/{robot_id}/rotation"))

    def compass(self, robot_id: str) -> float:
        return float(self.call(f"vget /robot/{robot_id}/compass"))

    def move(self, robot_id: str, direction: str) -> tuple[float, float, float, bool]:
        body = self.call(f"vset /robot/{robot_id}/move {direction}")
        x, y, z, collided = body.split(b" ")
        return float(x), float(y), float(z), collided == b"1"

    def rotate(self, robot_id: str, direction: str) -> None:
        self.call(f"vset /robot/{robot_id}/rotate {direction}")

    def set_trace(self, robot_id: str, enabled: bool) -> None:
        self.call(f"vset /robot/{robot_id}/trace {'on' if enabled else 'off'}")

    def download_trace(self, robot_id: str) -> bytes:
        return self.call(f"vget /robot/{robot_id}/trace")

    def plant_get(self, var: str) -> tuple[float, int]:
        value, stale_ms = self.call(f"vget /plant/{var}").split(b" ")
        return float(value), int(stale_ms)

    def plant_set(self, var: str, value: float) -> None:
        self.call(f"vset /plant/{var} {value!r}")

    def target_location(self) -> tuple[float, float, float]:
        x, y, z = self.call("vget /target/location").split(b" ")
        return float(x), float(y), float(z)

    def camera_bytes(self, robot_id: str, mode: str, width: int, height: int) -> bytes:
        return self.call(f"vget /camera/{robot_id}/{mode} {width} {height}")

    def topdown_bytes(self, mode: str) -> bytes:
        return self.call(f"vget /topdown {mode}")
