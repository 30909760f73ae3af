"""Framed TCP bridge server plus the in-package client used by the
bench harness and tests.

Each connection is one session; requests on a connection are handled
strictly in order (read, dispatch, reply), which is what guarantees
per-connection FIFO response ids.  Sessions die with their connection
and any possession is released.
"""

from __future__ import annotations

import logging
import socket
import socketserver
import threading
from typing import Optional

from ..netutil import TrackingTCPServer
from .core import Session, TwinServer
from .framing import FrameDecoder, FramingError, encode_frame

log = logging.getLogger(__name__)

RECV_CHUNK = 256 * 1024


class _BridgeHandler(socketserver.BaseRequestHandler):
    def setup(self) -> None:
        self.server.track(self.request)
        self.session = Session("tcp")

    def finish(self) -> None:
        self.server.untrack(self.request)
        self.server.twin.release_session(self.session)

    def handle(self) -> None:
        twin: TwinServer = self.server.twin
        sock = self.request
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        decoder = FrameDecoder()
        while True:
            try:
                data = sock.recv(RECV_CHUNK)
            except OSError:
                return
            if not data:
                return
            try:
                frames = decoder.feed(data)
            except FramingError as exc:
                log.warning("dropping connection, framing error: %s", exc)
                return
            for request_id, body_bytes in frames:
                try:
                    body = body_bytes.decode("utf-8")
                except UnicodeDecodeError:
                    response = b"error 400 request body must be UTF-8 text"
                else:
                    response = twin.dispatch(self.session, body)
                try:
                    sock.sendall(encode_frame(request_id, response))
                except OSError:
                    return


class BridgeServer(TrackingTCPServer):
    def __init__(self, addr, twin: TwinServer):
        super().__init__(addr, _BridgeHandler)
        self.twin = twin


def serve_bridge(twin: TwinServer, host: str = "127.0.0.1", port: int = 9000) -> BridgeServer:
    server = BridgeServer((host, port), twin)
    log.info("bridge listening on %s:%d", *server.server_address[:2])
    return server


class BridgeConnection:
    """Blocking single-in-flight client for the framed protocol."""

    def __init__(self, host: str = "127.0.0.1", port: int = 9000, timeout: float = 10.0):
        self.host = host
        self.port = port
        self.timeout = timeout
        self._sock: Optional[socket.socket] = None
        self._decoder = FrameDecoder()
        self._next_id = 0
        self._lock = threading.Lock()

    def connect(self) -> "BridgeConnection":
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

    def __enter__(self) -> "BridgeConnection":
        return self.connect()

    def __exit__(self, *exc) -> None:
        self.close()

    def request(self, body: str, timeout: Optional[float] = None) -> tuple[str, bytes]:
        """Send one command, await its response; returns (status, rest).

        status is "ok" or "error"; rest is the bytes after the status
        word (text or binary depending on the command).
        """
        if self._sock is None:
            raise ConnectionError("not connected")
        with self._lock:
            self._next_id += 1
            request_id = str(self._next_id)
            self._sock.settimeout(timeout if timeout is not None else self.timeout)
            self._sock.sendall(encode_frame(request_id, body.encode("utf-8")))
            while True:
                data = self._sock.recv(RECV_CHUNK)
                if not data:
                    raise ConnectionError("bridge closed connection")
                frames = self._decoder.feed(data)
                if frames:
                    echoed, payload = frames[0]
                    if echoed != request_id:
                        raise FramingError(
                            f"response id {echoed} does not match request {request_id}"
                        )
                    return split_status(payload)


def split_status(payload: bytes) -> tuple[str, bytes]:
    if payload == b"ok" or payload.startswith(b"ok "):
        return "ok", payload[3:]
    if payload.startswith(b"error "):
        return "error", payload[6:]
    raise FramingError(f"unrecognized response {payload[:40]!r}")
