"""Client side of the mirroring protocol: blocking requests plus the
polling cache the twin reads from.

The poller keeps one generation of values at a time.  Every period it
flushes queued writes as a single MSET, refreshes all names with a
single MGET (one server snapshot, so the generation is internally
consistent), asks TICK for the sample time, and swaps the generation in
atomically.  Connection loss marks the cache stale and reconnects with
exponential backoff while readers keep the last snapshot.
"""

from __future__ import annotations

import logging
import socket
import threading
import time
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from ..plant.registry import VariableDescriptor
from .protocol import MAX_LINE_BYTES, format_value

log = logging.getLogger(__name__)

BACKOFF_MIN_S = 0.1
BACKOFF_MAX_S = 5.0
DEFAULT_POLL_MS = 100


class MirrorError(RuntimeError):
    """Server answered ERR <code> <detail>."""

    def __init__(self, code: int, detail: str):
        super().__init__(f"ERR {code} {detail}")
        self.code = code
        self.detail = detail


class MirrorClient:
    """One blocking TCP connection speaking the line grammar."""

    def __init__(self, host: str = "127.0.0.1", port: int = 9100, timeout: float = 10.0):
        self.host = host
        self.port = port
        self.timeout = timeout
        self._sock: Optional[socket.socket] = None
        self._file = None

    def connect(self) -> "MirrorClient":
        sock = socket.create_connection((self.host, self.port), timeout=self.timeout)
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._sock = sock
        self._file = sock.makefile("rb")
        return self

    def close(self) -> None:
        if self._file is not None:
            try:
                self._file.close()
            except OSError:
                pass
            self._file = None
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
            self._sock = None

    def __enter__(self) -> "MirrorClient":
        return self.connect()

    def __exit__(self, *exc) -> None:
        self.close()

    @property
    def connected(self) -> bool:
        return self._sock is not None

    def _request_line(self, line: str) -> str:
        if self._sock is None or self._file is None:
            raise ConnectionError("not connected")
        self._sock.sendall(line.encode("utf-8") + b"\n")
        return self._read_line()

    def _read_line(self) -> str:
        raw = self._file.readline(MAX_LINE_BYTES + 2)
        if not raw:
            raise ConnectionError("server closed connection")
        return raw.rstrip(b"\n").decode("utf-8")

    @staticmethod
    def _expect_ok(line: str) -> list[str]:
        parts = line.split(" ")
        if parts[0] == "OK":
            return parts[1:]
        if parts[0] == "ERR" and len(parts) >= 2:
            raise MirrorError(int(parts[1]), " ".join(parts[2:]))
        raise MirrorError(500, f"unparseable response {line!r}")

    # -- verbs -----------------------------------------------------------

    def list(self) -> list[VariableDescriptor]:
        rest = self._expect_ok(self._request_line("LIST"))
        count = int(rest[0])
        rows = []
        for _ in range(count):
            name, unit, access, lo, hi = self._read_line().split(" ")
            rows.append(VariableDescriptor(name, unit, access, float(lo), float(hi)))
        end = self._read_line()
        if end != "END":
            raise MirrorError(500, f"LIST not terminated: {end!r}")
        return rows

    def get(self, name: str) -> float:
        return float(self._expect_ok(self._request_line(f"GET {name}"))[0])

    def mget(self, names: Sequence[str]) -> list[float]:
        rest = self._expect_ok(self._request_line("MGET " + " ".join(names)))
        if len(rest) != len(names):
            raise MirrorError(500, f"MGET returned {len(rest)} of {len(names)} values")
        return [float(v) for v in rest]

    def set(self, name: str, value: float) -> float:
        line = f"SET {name} {format_value(value)}"
        return float(self._expect_ok(self._request_line(line))[0])

    def mset(self, pairs: Sequence[tuple[str, float]]) -> list[float]:
        body = " ".join(f"{n}={format_value(v)}" for n, v in pairs)
        rest = self._expect_ok(self._request_line("MSET " + body))
        return [float(v) for v in rest]

    def tick(self) -> int:
        return int(self._expect_ok(self._request_line("TICK"))[0])

    def mode(self, mode: str) -> int:
        return int(self._expect_ok(self._request_line(f"MODE {mode}"))[0])

    def advance(self, ms: int) -> int:
        return int(self._expect_ok(self._request_line(f"ADVANCE {int(ms)}"))[0])


@dataclass(frozen=True)
class CacheGeneration:
    values: Mapping[str, float]
    sim_time_ms: int
    sampled_monotonic: float


class MirrorCache:
    """Atomic-swap value cache with a pending-write queue."""

    def __init__(self) -> None:
        self._generation = CacheGeneration({}, -1, time.monotonic())
        self._write_lock = threading.Lock()
        self._pending: dict[str, float] = {}
        self.stale = True

    @property
    def generation(self) -> CacheGeneration:
        return self._generation

    @property
    def values(self) -> Mapping[str, float]:
        return self._generation.values

    @property
    def sim_time_ms(self) -> int:
        return self._generation.sim_time_ms

    @property
    def staleness_ms(self) -> int:
        return int((time.monotonic() - self._generation.sampled_monotonic) * 1000.0)

    def write(self, name: str, value: float) -> None:
        with self._write_lock:
            self._pending[name] = float(value)

    def take_pending(self) -> list[tuple[str, float]]:
        with self._write_lock:
            pending = list(self._pending.items())
            self._pending.clear()
            return pending

    def requeue(self, pairs: Iterable[tuple[str, float]]) -> None:
        # Front-load failed writes so they win only if not overwritten since.
        with self._write_lock:
            merged = dict(pairs)
            merged.update(self._pending)
            self._pending = merged

    def publish(self, values: Mapping[str, float], sim_time_ms: int) -> None:
        self._generation = CacheGeneration(dict(values), sim_time_ms, time.monotonic())
        self.stale = False


def refresh_once(client: MirrorClient, cache: MirrorCache, names: Sequence[str]) -> None:
    """One poll cycle: flush writes, then MGET + TICK into a new generation."""
    pending = cache.take_pending()
    try:
        if pending:
            client.mset(pending)
        values = client.mget(names)
        t = client.tick()
    except Exception:
        cache.requeue(pending)
        raise
    cache.publish(dict(zip(names, values)), t)


class MirrorPoller:
    """Background thread running ``refresh_once`` every period."""

    def __init__(
        self,
        cache: MirrorCache,
        names: Sequence[str],
        host: str = "127.0.0.1",
        port: int = 9100,
        period_ms: int = DEFAULT_POLL_MS,
    ):
        self.cache = cache
        self.names = list(names)
        self.host = host
        self.port = port
        self.period_ms = period_ms
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def start(self) -> "MirrorPoller":
        self._thread = threading.Thread(target=self._run, name="mirror-poller", daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)
            self._thread = None

    def _run(self) -> None:
        period = self.period_ms / 1000.0
        backoff = BACKOFF_MIN_S
        client: Optional[MirrorClient] = None
        while not self._stop.is_set():
            if client is None:
                try:
                    client = MirrorClient(self.host, self.port, timeout=5.0).connect()
                    backoff = BACKOFF_MIN_S
                except OSError:
                    self.cache.stale = True
                    if self._stop.wait(backoff):
                        break
                    backoff = min(backoff * 2.0, BACKOFF_MAX_S)
                    continue
            started = time.monotonic()
            try:
                refresh_once(client, self.cache, self.names)
            except (OSError, ConnectionError, MirrorError) as exc:
                log.warning("mirror poll failed, reconnecting: %s", exc)
                self.cache.stale = True
                client.close()
                client = None
                continue
            elapsed = time.monotonic() - started
            if self._stop.wait(max(0.0, period - elapsed)):
                break
        if client is not None:
            client.close()
