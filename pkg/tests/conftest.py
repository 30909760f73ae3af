"""Shared fixtures: in-process plant + twin stacks on ephemeral ports."""

import threading

import pytest


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if "test_acceptance.py" not in str(report.nodeid):
        return
    if report.when != "call":
        return
    name = report.nodeid.split("::")[-1]
    verdict = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {verdict}: {name}", flush=True)

from npptwin.mirror.server import serve_mirror
from npptwin.plant import PlantSimulator
from npptwin.twin.bridge import BridgeConnection, serve_bridge
from npptwin.twin.core import TwinConfig, TwinServer
from npptwin.twin.gateway import serve_gateway


class InProcessStack:
    """plantd + twind equivalents inside the test process."""

    def __init__(self, mode="rt", tick_ms=20, poll_ms=40, record_dir=None, **twin_kwargs):
        self.sim = PlantSimulator()
        self.plant_server = serve_mirror(self.sim, port=0, tick_ms=tick_ms, mode=mode)
        self._threads = [
            threading.Thread(
                target=self.plant_server.serve_forever,
                kwargs={"poll_interval": 0.05},
                daemon=True,
            )
        ]
        self._threads[-1].start()
        self.config = TwinConfig(
            plant_port=self.plant_server.server_address[1],
            tick_ms=tick_ms,
            poll_ms=poll_ms,
            mode=mode,
            record_dir=record_dir,
            **twin_kwargs,
        )
        self.twin = TwinServer(self.config)
        self.twin.start()
        self.bridge = serve_bridge(self.twin, port=0)
        self._threads.append(
            threading.Thread(
                target=self.bridge.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True
            )
        )
        self._threads[-1].start()
        self.gateway = serve_gateway(self.twin, port=0)
        self._threads.append(
            threading.Thread(
                target=self.gateway.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True
            )
        )
        self._threads[-1].start()
        self.bridge_port = self.bridge.server_address[1]
        self.http_port = self.gateway.server_address[1]

    def connect(self) -> BridgeConnection:
        return BridgeConnection(port=self.bridge_port).connect()

    def close(self) -> None:
        for server in (self.bridge, self.gateway, self.plant_server):
            server.shutdown()
        self.twin.stop()
        self.plant_server.service.shutdown()
        for server in (self.bridge, self.gateway, self.plant_server):
            server.server_close()


@pytest.fixture()
def rt_stack():
    stack = InProcessStack(mode="rt")
    yield stack
    stack.close()


@pytest.fixture()
def lockstep_stack():
    stack = InProcessStack(mode="lockstep", tick_ms=50)
    yield stack
    stack.close()
