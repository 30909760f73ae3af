"""RSS/CPU sampling of the service processes at 1 Hz."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

try:
    import psutil
except ImportError:  # pragma: no cover - psutil is a hard dependency
    psutil = None


@dataclass
class ProcessSamples:
    name: str
    pid: int
    rss_bytes: list[float] = field(default_factory=list)
    cpu_pct: list[float] = field(default_factory=list)

    @property
    def rss_mean(self) -> float:
        return sum(self.rss_bytes) / len(self.rss_bytes) if self.rss_bytes else 0.0

    @property
    def rss_max(self) -> float:
        return max(self.rss_bytes) if self.rss_bytes else 0.0

    @property
    def cpu_mean(self) -> float:
        return sum(self.cpu_pct) / len(self.cpu_pct) if self.cpu_pct else 0.0

    @property
    def cpu_max(self) -> float:
        return max(self.cpu_pct) if self.cpu_pct else 0.0


def sample_processes(
    named_pids: dict[str, int],
    duration_s: float,
    interval_s: float = 1.0,
    stop_check=None,
) -> Optional[list[ProcessSamples]]:
    """Sample every process each second for the duration; returns None
    when sampling is unsupported on this platform."""
    if psutil is None:
        return None
    procs = {}
    out = []
    for name, pid in named_pids.items():
        try:
            proc = psutil.Process(pid)
            proc.cpu_percent(None)  # prime the per-process counter
        except psutil.Error:
            return None
        procs[name] = proc
        out.append(ProcessSamples(name, pid))
    samples_wanted = max(1, int(round(duration_s / interval_s)))
    for _ in range(samples_wanted):
        if stop_check is not None and stop_check():
            break
        time.sleep(interval_s)
        for record, (name, proc) in zip(out, procs.items()):
            try:
                record.rss_bytes.append(float(proc.memory_info().rss))
                record.cpu_pct.append(float(proc.cpu_percent(None)))
            except psutil.Error:
                pass
    return out
