"""Shared TCP server plumbing."""

from __future__ import annotations

import socketserver
import threading


class TrackingTCPServer(socketserver.ThreadingTCPServer):
    """Threading TCP server that closes live sessions on server_close,
    so an in-process shutdown looks like process death to clients."""

    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, addr, handler_cls):
        super().__init__(addr, handler_cls)
        self._conn_lock = threading.Lock()
        self._connections: set = set()

    def track(self, conn) -> None:
        with self._conn_lock:
            self._connections.add(conn)

    def untrack(self, conn) -> None:
        with self._conn_lock:
            self._connections.discard(conn)

    def server_close(self) -> None:
        with self._conn_lock:
            conns = list(self._connections)
            self._connections.clear()
        for conn in conns:
            try:
                conn.shutdown(2)  # SHUT_RDWR
            except OSError:
                pass
        super().server_close()


class TrackedHandler(socketserver.BaseRequestHandler):
    def setup(self) -> None:
        self.server.track(self.request)

    def finish(self) -> None:
        self.server.untrack(self.request)
