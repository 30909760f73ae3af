"""Browser gateway: static console assets over HTTP plus a WebSocket
endpoint at /ws speaking JSON envelopes around the bridge commands.

Request:   {"id": n, "cmd": "<command body>"}  (plus "subscribe" /
           "unsubscribe" pseudo-commands handled at the gateway)
Response:  {"id": n, "status": "ok|error", "body": "..."} with binary
           image payloads lifted into {"image": {"w", "h", "b64"}} as
           base64 of the raw RGB buffer.
Push:      {"event": "tick", "t_ms": ..., "robots": [...], "plant": {...}}
           at 10 Hz to subscribed sessions, only when sim time moved.

The WebSocket side is the server half of RFC 6455 for text frames:
enough for the operator console, with ping/pong and close handled and
everything else rejected.
"""

from __future__ import annotations

import base64
import hashlib
import json
import logging
import mimetypes
import os
import socket
import socketserver
import struct
import threading
from typing import Optional

from ..netutil import TrackingTCPServer
from ..render.image import decode_ppm
from .core import Session, TwinServer

log = logging.getLogger(__name__)

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
PUSH_PERIOD_S = 0.1
MAX_WS_MESSAGE = 1 * 1024 * 1024

FALLBACK_INDEX = b"""<!doctype html>
<html><head><title>npptwin</title></head>
<body><h1>npptwin gateway</h1>
<p>No console assets are configured (start twind with --assets-dir
pointing at the built operator console). The WebSocket endpoint is at
<code>/ws</code>.</p></body></html>
"""


def websocket_accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def encode_text_frame(payload: bytes) -> bytes:
    length = len(payload)
    if length < 126:
        header = struct.pack("!BB", 0x81, length)
    elif length < 65536:
        header = struct.pack("!BBH", 0x81, 126, length)
    else:
        header = struct.pack("!BBQ", 0x81, 127, length)
    return header + payload


def encode_close_frame(code: int = 1000) -> bytes:
    return struct.pack("!BBH", 0x88, 2, code)


class _WsConnection:
    """One upgraded socket; writes are serialized so pushes never
    interleave with responses."""

    def __init__(self, sock: socket.socket):
        self.sock = sock
        self._write_lock = threading.Lock()
        self.open = True

    def send_json(self, obj: dict) -> bool:
        data = encode_text_frame(json.dumps(obj, separators=(",", ":")).encode("utf-8"))
        with self._write_lock:
            if not self.open:
                return False
            try:
                self.sock.sendall(data)
                return True
            except OSError:
                self.open = False
                return False

    def close(self, code: int = 1000) -> None:
        with self._write_lock:
            if not self.open:
                return
            self.open = False
            try:
                self.sock.sendall(encode_close_frame(code))
            except OSError:
                pass
            try:
                self.sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass


def _read_exact(sock: socket.socket, n: int) -> Optional[bytes]:
    buf = bytearray()
    while len(buf) < n:
        try:
            chunk = sock.recv(n - len(buf))
        except OSError:
            return None
        if not chunk:
            return None
        buf.extend(chunk)
    return bytes(buf)


def read_ws_message(sock: socket.socket) -> Optional[str]:
    """Read one complete (possibly fragmented) client text message."""
    message = bytearray()
    while True:
        header = _read_exact(sock, 2)
        if header is None:
            return None
        fin = header[0] & 0x80
        opcode = header[0] & 0x0F
        masked = header[1] & 0x80
        length = header[1] & 0x7F
        if length == 126:
            ext = _read_exact(sock, 2)
            if ext is None:
                return None
            (length,) = struct.unpack("!H", ext)
        elif length == 127:
            ext = _read_exact(sock, 8)
            if ext is None:
                return None
            (length,) = struct.unpack("!Q", ext)
        if length > MAX_WS_MESSAGE:
            return None
        mask = b"\x00\x00\x00\x00"
        if masked:
            mask = _read_exact(sock, 4)
            if mask is None:
                return None
        payload = _read_exact(sock, length) if length else b""
        if payload is None:
            return None
        if masked:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        if opcode == 0x8:  # close
            return None
        if opcode == 0x9:  # ping -> pong
            try:
                sock.sendall(struct.pack("!BB", 0x8A, len(payload)) + payload)
            except OSError:
                return None
            continue
        if opcode == 0xA:  # pong
            continue
        if opcode in (0x1, 0x0, 0x2):
            message.extend(payload)
            if fin:
                return message.decode("utf-8", errors="replace")
            continue
        return None


class _GatewayHandler(socketserver.BaseRequestHandler):
    def setup(self) -> None:
        self.server.track(self.request)

    def finish(self) -> None:
        self.server.untrack(self.request)

    def handle(self) -> None:
        sock: socket.socket = self.request
        request = self._read_http_request(sock)
        if request is None:
            return
        method, path, headers = request
        if path.split("?", 1)[0] == "/ws":
            if headers.get("upgrade", "").lower() != "websocket":
                self._plain(sock, 426, b"upgrade to websocket required")
                return
            self._serve_ws(sock, headers)
            return
        if method != "GET":
            self._plain(sock, 405, b"method not allowed")
            return
        self._serve_static(sock, path)

    # -- HTTP ------------------------------------------------------------

    def _read_http_request(self, sock) -> Optional[tuple[str, str, dict]]:
        sock.settimeout(10.0)
        data = bytearray()
        while b"\r\n\r\n" not in data:
            try:
                chunk = sock.recv(8192)
            except OSError:
                return None
            if not chunk:
                return None
            data.extend(chunk)
            if len(data) > 64 * 1024:
                return None
        head = data.split(b"\r\n\r\n", 1)[0].decode("latin-1")
        lines = head.split("\r\n")
        try:
            method, path, _version = lines[0].split(" ", 2)
        except ValueError:
            return None
        headers = {}
        for line in lines[1:]:
            name, _, value = line.partition(":")
            headers[name.strip().lower()] = value.strip()
        return method, path, headers

    def _plain(self, sock, status: int, body: bytes, content_type: str = "text/plain") -> None:
        reason = {200: "OK", 404: "Not Found", 405: "Method Not Allowed", 426: "Upgrade Required"}
        head = (
            f"HTTP/1.1 {status} {reason.get(status, 'OK')}\r\n"
            f"Content-Type: {content_type}\r\n"
            f"Content-Length: {len(body)}\r\n"
            "Connection: close\r\n\r\n"
        ).encode("latin-1")
        try:
            sock.sendall(head + body)
        except OSError:
            pass

    def _serve_static(self, sock, path: str) -> None:
        assets = self.server.assets_dir
        rel = path.split("?", 1)[0].lstrip("/")
        if rel == "":
            rel = "index.html"
        if assets is None:
            if rel == "index.html":
                self._plain(sock, 200, FALLBACK_INDEX, "text/html")
            else:
                self._plain(sock, 404, b"not found")
            return
        full = os.path.realpath(os.path.join(assets, rel))
        if not full.startswith(os.path.realpath(assets) + os.sep) and full != os.path.realpath(assets):
            self._plain(sock, 404, b"not found")
            return
        if not os.path.isfile(full):
            self._plain(sock, 404, b"not found")
            return
        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        with open(full, "rb") as fh:
            self._plain(sock, 200, fh.read(), ctype)

    # -- WebSocket ---------------------------------------------------------

    def _serve_ws(self, sock, headers: dict) -> None:
        key = headers.get("sec-websocket-key")
        if not key:
            self._plain(sock, 426, b"missing websocket key")
            return
        response = (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {websocket_accept_key(key)}\r\n\r\n"
        ).encode("latin-1")
        try:
            sock.sendall(response)
        except OSError:
            return
        sock.settimeout(None)
        conn = _WsConnection(sock)
        session = Session("ws")
        twin: TwinServer = self.server.twin
        self.server.register_ws(session, conn)
        try:
            while True:
                text = read_ws_message(sock)
                if text is None:
                    return
                self._handle_ws_message(twin, session, conn, text)
        finally:
            self.server.unregister_ws(session)
            twin.release_session(session)
            conn.close()

    def _handle_ws_message(self, twin, session, conn, text: str) -> None:
        try:
            msg = json.loads(text)
            msg_id = msg["id"]
            command = msg["cmd"]
            if not isinstance(command, str):
                raise TypeError("cmd must be a string")
        except (ValueError, KeyError, TypeError):
            conn.send_json({"id": None, "status": "error", "body": "400"})
            return
        if command == "subscribe":
            session.subscribed = True
            conn.send_json({"id": msg_id, "status": "ok", "body": "subscribed"})
            return
        if command == "unsubscribe":
            session.subscribed = False
            conn.send_json({"id": msg_id, "status": "ok", "body": "unsubscribed"})
            return
        response = twin.dispatch(session, command)
        conn.send_json(ws_response(msg_id, response))


def ws_response(msg_id, response: bytes) -> dict:
    """Map a bridge response body onto the gateway JSON envelope."""
    status = "ok" if response == b"ok" or response.startswith(b"ok ") else "error"
    rest = response[3:] if status == "ok" else response[6:]
    marker = rest.find(b"P6\n")
    if status == "ok" and marker >= 0:
        img = decode_ppm(rest[marker:])
        return {
            "id": msg_id,
            "status": "ok",
            "body": rest[:marker].decode("utf-8").rstrip(" "),
            "image": {
                "w": img.width,
                "h": img.height,
                "b64": base64.b64encode(bytes(img.data)).decode("ascii"),
            },
        }
    return {"id": msg_id, "status": status, "body": rest.decode("utf-8", errors="replace")}


class GatewayServer(TrackingTCPServer):
    def __init__(self, addr, twin: TwinServer, assets_dir: Optional[str] = None):
        super().__init__(addr, _GatewayHandler)
        self.twin = twin
        self.assets_dir = assets_dir
        self._ws_lock = threading.Lock()
        self._ws_sessions: dict[str, tuple[Session, _WsConnection]] = {}
        self._push_stop = threading.Event()
        self._push_thread = threading.Thread(target=self._push_loop, name="ws-push", daemon=True)
        self._push_thread.start()

    def register_ws(self, session: Session, conn: _WsConnection) -> None:
        with self._ws_lock:
            self._ws_sessions[session.id] = (session, conn)

    def unregister_ws(self, session: Session) -> None:
        with self._ws_lock:
            self._ws_sessions.pop(session.id, None)

    def _push_loop(self) -> None:
        last_t = -1
        while not self._push_stop.wait(PUSH_PERIOD_S):
            snap = self.twin.snapshot
            if snap.t_ms == last_t:
                continue
            with self._ws_lock:
                targets = [c for s, c in self._ws_sessions.values() if s.subscribed]
            if not targets:
                last_t = snap.t_ms
                continue
            event = {
                "event": "tick",
                "t_ms": snap.t_ms,
                "robots": [
                    {
                        "id": v.id, "kind": v.kind,
                        "x": v.x_m, "y": v.y_m, "z": v.z_m, "yaw": v.yaw_deg,
                    }
                    for v in snap.robots.values()
                ],
                "plant": dict(snap.plant_values),
            }
            for conn in targets:
                conn.send_json(event)
            last_t = snap.t_ms

    def server_close(self) -> None:
        self._push_stop.set()
        self._push_thread.join(timeout=1.0)
        with self._ws_lock:
            conns = [c for _, c in self._ws_sessions.values()]
            self._ws_sessions.clear()
        for conn in conns:
            conn.close()
        super().server_close()


def serve_gateway(
    twin: TwinServer,
    host: str = "127.0.0.1",
    port: int = 8080,
    assets_dir: Optional[str] = None,
) -> GatewayServer:
    server = GatewayServer((host, port), twin, assets_dir)
    log.info("gateway listening on %s:%d", *server.server_address[:2])
    return server
