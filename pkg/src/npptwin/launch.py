"""Subprocess lifecycle helpers for the plant + twin service pair.

Used by the bench harness (which owns service restarts during the
functional protocol) and by integration tests.
"""

from __future__ import annotations

import socket
import subprocess
import sys
import time
from dataclasses import dataclass, field
from typing import Optional


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def wait_for_port(port: int, host: str = "127.0.0.1", timeout_s: float = 10.0) -> None:
    deadline = time.monotonic() + timeout_s
    last: Optional[Exception] = None
    while time.monotonic() < deadline:
        try:
            with socket.create_connection((host, port), timeout=0.5):
                return
        except OSError as exc:
            last = exc
            time.sleep(0.02)
    raise TimeoutError(f"nothing listening on {host}:{port} after {timeout_s}s: {last}")


@dataclass
class ServicePair:
    """One plantd + one twind on loopback, on fresh ports."""

    mode: str = "rt"
    plant_tick_ms: int = 50
    twin_tick_ms: int = 50
    poll_ms: int = 100
    seed: int = 0
    record_dir: Optional[str] = None
    topdown_interval_ms: int = 1000
    env_max_steps: int = 500
    plant_module: str = "npptwin.plant.daemon"
    extra_plantd_args: list = field(default_factory=list)
    extra_twind_args: list = field(default_factory=list)
    plant_port: int = 0
    bridge_port: int = 0
    http_port: int = 0
    plant_proc: Optional[subprocess.Popen] = None
    twin_proc: Optional[subprocess.Popen] = None

    def start(self) -> "ServicePair":
        self.plant_port = free_port()
        self.bridge_port = free_port()
        self.http_port = free_port()
        plant_args = [
            sys.executable, "-m", self.plant_module,
            "--port", str(self.plant_port),
            "--tick-ms", str(self.plant_tick_ms),
            "--mode", self.mode,
        ]
        if self.plant_module == "npptwin.plant.daemon":
            plant_args += ["--log-level", "WARNING"]
        plant_args += list(self.extra_plantd_args)
        self.plant_proc = subprocess.Popen(
            plant_args, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL
        )
        wait_for_port(self.plant_port)
        twind_args = [
            sys.executable, "-m", "npptwin.twin.daemon",
            "--bridge-port", str(self.bridge_port),
            "--http-port", str(self.http_port),
            "--plant-addr", f"127.0.0.1:{self.plant_port}",
            "--tick-ms", str(self.twin_tick_ms),
            "--poll-ms", str(self.poll_ms),
            "--mode", self.mode,
            "--seed", str(self.seed),
            "--env-max-steps", str(self.env_max_steps),
            "--topdown-interval-ms", str(self.topdown_interval_ms),
            "--log-level", "WARNING",
        ]
        if self.record_dir:
            twind_args += ["--record-dir", self.record_dir]
        twind_args += list(self.extra_twind_args)
        self.twin_proc = subprocess.Popen(
            twind_args, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL
        )
        wait_for_port(self.bridge_port)
        wait_for_port(self.http_port)
        return self

    def stop(self) -> None:
        for proc in (self.twin_proc, self.plant_proc):
            if proc is None:
                continue
            proc.terminate()
        for proc in (self.twin_proc, self.plant_proc):
            if proc is None:
                continue
            try:
                proc.wait(timeout=5.0)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait(timeout=5.0)
        self.twin_proc = None
        self.plant_proc = None

    def __enter__(self) -> "ServicePair":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
