"""TCP server side of the mirroring protocol.

``MirrorService`` binds the line grammar to any backend exposing the
small surface the plant simulator has:

    registry        -> list of VariableDescriptor
    snapshot        -> Mapping[str, float]   (immutable per generation)
    sim_time_ms     -> int
    write_var(name, value) -> applied float  (raises UnknownVariableError
                              / ReadOnlyVariableError)
    step(dt_ms) / advance(total_ms, tick_ms)

so a scripted stand-in can replace the real plant without the twin
noticing.  One handler thread per connection; every request is answered
from a single snapshot reference, which is what makes batched reads
tear-free.
"""

from __future__ import annotations

import logging
import socketserver
import threading
import time

from ..plant.registry import ReadOnlyVariableError, UnknownVariableError
from .protocol import (
    AdvanceRequest,
    GetRequest,
    ListRequest,
    MAX_LINE_BYTES,
    MGetRequest,
    ModeRequest,
    MSetRequest,
    ProtocolError,
    SetRequest,
    TickRequest,
    format_value,
    parse_request,
)

log = logging.getLogger(__name__)

MODE_RT = "rt"
MODE_LOCKSTEP = "lockstep"


class MirrorService:
    """Protocol logic plus the real-time ticker, shared by all sessions."""

    def __init__(self, backend, tick_ms: int = 50, mode: str = MODE_RT):
        self.backend = backend
        self.tick_ms = int(tick_ms)
        self._mode = mode
        self._mode_lock = threading.Lock()
        self._stop = threading.Event()
        self._ticker: threading.Thread | None = None
        if mode == MODE_RT:
            self._start_ticker()

    # -- lifecycle -----------------------------------------------------

    def _start_ticker(self) -> None:
        self._stop.clear()
        self._ticker = threading.Thread(target=self._run_rt, name="plant-ticker", daemon=True)
        self._ticker.start()

    def _run_rt(self) -> None:
        period = self.tick_ms / 1000.0
        next_due = time.monotonic() + period
        while not self._stop.is_set():
            delay = next_due - time.monotonic()
            if delay > 0:
                if self._stop.wait(delay):
                    break
            self.backend.step(self.tick_ms)
            next_due += period
            # If stepping overran, retick immediately rather than skipping.
            if next_due < time.monotonic():
                next_due = time.monotonic()

    def shutdown(self) -> None:
        self._stop.set()
        if self._ticker is not None:
            self._ticker.join(timeout=2.0)
            self._ticker = None

    @property
    def mode(self) -> str:
        return self._mode

    def set_mode(self, mode: str) -> None:
        with self._mode_lock:
            if mode == self._mode:
                return
            if mode == MODE_RT:
                self._mode = MODE_RT
                self._start_ticker()
            else:
                self._mode = MODE_LOCKSTEP
                self._stop.set()
                if self._ticker is not None:
                    self._ticker.join(timeout=2.0)
                    self._ticker = None

    # -- request handling ------------------------------------------------

    def handle_line(self, line: str) -> list[str]:
        """One request line in, one or more LF-ready response lines out."""
        try:
            req = parse_request(line)
        except ProtocolError as exc:
            return [f"ERR 400 {exc.message}"]
        try:
            return self._dispatch(req)
        except UnknownVariableError as exc:
            return [f"ERR 404 {exc.name}"]
        except ReadOnlyVariableError as exc:
            return [f"ERR 403 {exc.name}"]

    def _dispatch(self, req) -> list[str]:
        if isinstance(req, ListRequest):
            rows = [f"OK {len(self.backend.registry)}"]
            for d in self.backend.registry:
                rows.append(
                    f"{d.name} {d.unit} {d.access} {format_value(d.min)} {format_value(d.max)}"
                )
            rows.append("END")
            return rows
        if isinstance(req, GetRequest):
            snap = self.backend.snapshot
            if req.name not in snap:
                raise UnknownVariableError(req.name)
            return [f"OK {format_value(snap[req.name])}"]
        if isinstance(req, MGetRequest):
            snap = self.backend.snapshot  # one reference: tear-free batch
            values = []
            for name in req.names:
                if name not in snap:
                    raise UnknownVariableError(name)
                values.append(format_value(snap[name]))
            return ["OK " + " ".join(values)]
        if isinstance(req, SetRequest):
            return [f"OK {format_value(self.backend.write_var(req.name, req.value))}"]
        if isinstance(req, MSetRequest):
            # Validate the whole batch before applying any of it.
            snap_names = {d.name: d for d in self.backend.registry}
            for name, _, _ in req.pairs:
                desc = snap_names.get(name)
                if desc is None:
                    raise UnknownVariableError(name)
                if not desc.writable:
                    raise ReadOnlyVariableError(name)
            applied = [
                format_value(self.backend.write_var(name, value))
                for name, value, _ in req.pairs
            ]
            return ["OK " + " ".join(applied)]
        if isinstance(req, TickRequest):
            return [f"OK {self.backend.sim_time_ms}"]
        if isinstance(req, ModeRequest):
            self.set_mode(req.mode)
            return [f"OK {self.backend.sim_time_ms}"]
        if isinstance(req, AdvanceRequest):
            if self._mode != MODE_LOCKSTEP:
                return ["ERR 409 mode"]
            t = self.backend.advance(req.ms, self.tick_ms)
            return [f"OK {t}"]
        raise ProtocolError(f"unhandled request {req!r}")


class _Handler(socketserver.StreamRequestHandler):
    def setup(self) -> None:
        super().setup()
        self.server.track(self.connection)  # type: ignore[attr-defined]

    def finish(self) -> None:
        self.server.untrack(self.connection)  # type: ignore[attr-defined]
        super().finish()

    def handle(self) -> None:
        service: MirrorService = self.server.service  # type: ignore[attr-defined]
        while True:
            try:
                raw = self.rfile.readline(MAX_LINE_BYTES + 2)
            except (ConnectionError, OSError):
                return
            if not raw:
                return
            if not raw.endswith(b"\n"):
                self._reply(["ERR 400 line exceeds 64 KiB or is unterminated"])
                return
            line = raw[:-1].decode("utf-8", errors="replace")
            try:
                self._reply(service.handle_line(line))
            except (ConnectionError, OSError):
                return

    def _reply(self, lines: list[str]) -> None:
        self.wfile.write(("".join(l + "\n" for l in lines)).encode("utf-8"))


class MirrorServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, addr, service: MirrorService):
        super().__init__(addr, _Handler)
        self.service = service
        self._conn_lock = threading.Lock()
        self._connections: set = set()

    def track(self, conn) -> None:
        with self._conn_lock:
            self._connections.add(conn)

    def untrack(self, conn) -> None:
        with self._conn_lock:
            self._connections.discard(conn)

    def server_close(self) -> None:
        # A stopped listener with live sessions is not an outage; tests and
        # launchers expect close to look like process death.
        with self._conn_lock:
            conns = list(self._connections)
            self._connections.clear()
        for conn in conns:
            try:
                conn.shutdown(2)  # SHUT_RDWR
            except OSError:
                pass
        super().server_close()


def serve_mirror(backend, host: str = "127.0.0.1", port: int = 9100,
                 tick_ms: int = 50, mode: str = MODE_RT) -> MirrorServer:
    """Start serving ``backend`` on host:port; returns the running server.

    The caller owns the server thread:  call ``serve_forever`` (blocking)
    or spin it in a thread and later ``shutdown()``.
    """
    service = MirrorService(backend, tick_ms=tick_ms, mode=mode)
    server = MirrorServer((host, port), service)
    sock_host, sock_port = server.server_address[:2]
    log.info("mirror server listening on %s:%d (mode=%s)", sock_host, sock_port, mode)
    return server
