"""Interval capture of top-down frames to numbered PPM files."""

from __future__ import annotations

import logging
import os
from typing import Callable, Optional

from .image import Image, encode_ppm

log = logging.getLogger(__name__)

DEFAULT_INTERVAL_MS = 1000


class TopdownRecorder:
    """Writes ``topdown_<seq:05>_<t_ms>.ppm`` every interval of sim time.

    Driven by the tick loop via :meth:`on_tick`; a time jump emits one
    file per elapsed interval so sequence numbers stay gapless.  A write
    failure stops the recorder and surfaces the error on ``failure``.
    """

    def __init__(
        self,
        directory: str,
        render: Callable[[], Image],
        interval_ms: int = DEFAULT_INTERVAL_MS,
    ):
        if interval_ms < 1:
            raise ValueError(f"interval_ms must be >= 1, got {interval_ms}")
        self.directory = directory
        self.render = render
        self.interval_ms = int(interval_ms)
        self.seq = 0
        self.next_due_ms = self.interval_ms
        self.failure: Optional[OSError] = None
        os.makedirs(directory, exist_ok=True)

    @property
    def stopped(self) -> bool:
        return self.failure is not None

    def on_tick(self, sim_time_ms: int) -> int:
        """Capture all frames due at or before ``sim_time_ms``; returns
        the number written."""
        written = 0
        while self.failure is None and sim_time_ms >= self.next_due_ms:
            name = f"topdown_{self.seq:05d}_{self.next_due_ms}.ppm"
            path = os.path.join(self.directory, name)
            try:
                with open(path, "wb") as fh:
                    fh.write(encode_ppm(self.render()))
            except OSError as exc:
                self.failure = exc
                log.error("top-down recorder stopped: %s", exc)
                break
            self.seq += 1
            self.next_due_ms += self.interval_ms
            written += 1
        return written
