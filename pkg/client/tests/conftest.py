"""Client tests run against real services launched as subprocesses.

The primary package (npptwin) must be installed; it is a test-only
dependency used purely to launch plantd/twind -- the client package
itself touches nothing but the wire.
"""

import pytest

from npptwin.launch import ServicePair


@pytest.fixture(scope="module")
def rt_services():
    with ServicePair(mode="rt", plant_tick_ms=20, twin_tick_ms=20, poll_ms=40) as services:
        yield services
