"""Wall-clock measurement helpers: no warm-up, first rep included."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Sequence


@dataclass(frozen=True)
class Stats:
    runs: int
    mean_ms: float
    p50_ms: float
    p95_ms: float
    max_ms: float

    @classmethod
    def from_samples(cls, samples_ms: Sequence[float]) -> "Stats":
        if not samples_ms:
            raise ValueError("no samples")
        ordered = sorted(samples_ms)
        return cls(
            runs=len(ordered),
            mean_ms=sum(ordered) / len(ordered),
            p50_ms=percentile(ordered, 0.50),
            p95_ms=percentile(ordered, 0.95),
            max_ms=ordered[-1],
        )


def percentile(ordered: Sequence[float], q: float) -> float:
    """Nearest-rank percentile on an already sorted sequence."""
    if not ordered:
        raise ValueError("no samples")
    rank = math.ceil(q * len(ordered))
    return ordered[max(0, rank - 1)]


def measure_ms(fn: Callable[[], object]) -> tuple[float, object]:
    """Timestamp immediately before and after one call; returns (ms, result)."""
    start = time.perf_counter_ns()
    result = fn()
    elapsed = (time.perf_counter_ns() - start) / 1e6
    return elapsed, result


def busy_wait_ms(ms: float) -> None:
    deadline = time.perf_counter() + ms / 1000.0
    while time.perf_counter() < deadline:
        pass
