"""Speed, resource, and functional suite orchestration."""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass
from typing import Optional

from ..launch import ServicePair
from ..mirror.client import MirrorClient
from .ops import OPERATIONS, BenchContext, Operation, PostconditionError
from .report import BenchReport, ResourcePhase
from .resources import sample_processes
from .timing import Stats, measure_ms

log = logging.getLogger(__name__)


@dataclass
class SuiteConfig:
    runs: int = 100
    topdown_images: int = 100
    topdown_delay_ms: int = 1000
    resource_duration_s: float = 60.0
    functional_cycles: int = 10
    functional_runs: int = 10


class _OpSampler:
    """Background 1 Hz sampler that tags samples with the active op."""

    def __init__(self, named_pids: dict[str, int]):
        self._named_pids = named_pids
        self._current: Optional[str] = None
        self._samples: dict[str, dict[str, list[tuple[float, float]]]] = {}
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def set_operation(self, name: Optional[str]) -> None:
        self._current = name

    def start(self) -> "_OpSampler":
        try:
            import psutil
        except ImportError:
            return self
        self._procs = {}
        for name, pid in self._named_pids.items():
            try:
                proc = psutil.Process(pid)
                proc.cpu_percent(None)
                self._procs[name] = proc
            except psutil.Error:
                return self
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()
        return self

    def _run(self) -> None:
        import psutil

        while not self._stop.wait(1.0):
            op = self._current
            if op is None:
                continue
            bucket = self._samples.setdefault(op, {})
            for name, proc in self._procs.items():
                try:
                    rss = float(proc.memory_info().rss)
                    cpu = float(proc.cpu_percent(None))
                except psutil.Error:
                    continue
                bucket.setdefault(name, []).append((rss, cpu))

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)

    def summarize(self, op_name: str) -> Optional[tuple[float, float, float, float]]:
        bucket = self._samples.get(op_name)
        if not bucket:
            return None
        rss = [v for series in bucket.values() for v, _ in series]
        cpu_by_sample: list[float] = []
        lengths = {len(series) for series in bucket.values()}
        n = min(lengths) if lengths else 0
        for i in range(n):
            cpu_by_sample.append(sum(series[i][1] for series in bucket.values()))
        if not rss or not cpu_by_sample:
            return None
        total_rss_mean = sum(
            sum(v for v, _ in series) / len(series) for series in bucket.values()
        )
        total_rss_max = sum(max(v for v, _ in series) for series in bucket.values())
        return (
            total_rss_mean,
            total_rss_max,
            sum(cpu_by_sample) / len(cpu_by_sample),
            max(cpu_by_sample),
        )


def run_speed(
    ctx: BenchContext,
    report: BenchReport,
    config: SuiteConfig,
    sampler: Optional[_OpSampler] = None,
) -> None:
    for op in OPERATIONS:
        if sampler is not None:
            sampler.set_operation(op.name)
        row = report.operation(op.name)
        if op.delayed_capture:
            row.stats = _run_delayed_capture(ctx, op, config)
        else:
            samples = []
            for _ in range(config.runs):
                elapsed, _ = measure_ms(lambda: op.run(ctx))
                samples.append(elapsed)
            row.stats = Stats.from_samples(samples)
        if sampler is not None:
            summary = sampler.summarize(op.name)
            if summary is not None:
                row.rss_mean, row.rss_max, row.cpu_mean, row.cpu_max = summary
            sampler.set_operation(None)
        log.info("speed %-22s mean %.2f ms p50 %.2f ms", op.name,
                 row.stats.mean_ms, row.stats.p50_ms)


def _run_delayed_capture(ctx: BenchContext, op: Operation, config: SuiteConfig) -> Stats:
    """One run of N captures with fixed delays; delays subtracted."""
    delay_s = config.topdown_delay_ms / 1000.0
    per_capture = []
    total_start = time.perf_counter_ns()
    for k in range(config.topdown_images):
        elapsed, _ = measure_ms(lambda: op.run(ctx))
        per_capture.append(elapsed)
        if k != config.topdown_images - 1:
            time.sleep(delay_s)
    total_ms = (time.perf_counter_ns() - total_start) / 1e6
    overhead_ms = total_ms - config.topdown_delay_ms * (config.topdown_images - 1)
    stats = Stats.from_samples(per_capture)
    # Mean from the delay-subtracted total; percentiles from per-capture stamps.
    return Stats(
        runs=stats.runs,
        mean_ms=overhead_ms / config.topdown_images,
        p50_ms=stats.p50_ms,
        p95_ms=stats.p95_ms,
        max_ms=stats.max_ms,
    )


def run_resources(
    services: ServicePair,
    ctx: BenchContext,
    report: BenchReport,
    config: SuiteConfig,
) -> None:
    named = {
        "plantd": services.plant_proc.pid,
        "twind": services.twin_proc.pid,
    }
    report.resource_duration_s = config.resource_duration_s
    idle = sample_processes(named, config.resource_duration_s)
    if idle is None:
        report.notes.append("resource sampling unsupported on this platform")
        return
    report.resource_phases.append(ResourcePhase("idle_baseline", idle))

    stop = threading.Event()

    def churn() -> None:
        fast_ops = [op for op in OPERATIONS if not op.delayed_capture]
        while not stop.is_set():
            for op in fast_ops:
                if stop.is_set():
                    return
                try:
                    op.run(ctx)
                except (PostconditionError, OSError, ConnectionError) as exc:
                    log.warning("active-load op %s failed: %s", op.name, exc)
                    return

    worker = threading.Thread(target=churn, daemon=True)
    worker.start()
    active = sample_processes(named, config.resource_duration_s)
    stop.set()
    worker.join(timeout=5.0)
    if active is not None:
        report.resource_phases.append(ResourcePhase("active", active))


def run_functional(
    report: BenchReport,
    config: SuiteConfig,
    tick_ms: int = 20,
    launcher=None,
) -> None:
    """The restart protocol: per operation, ``functional_cycles`` fresh
    service launches, ``functional_runs`` postconditioned runs each.

    ``launcher`` builds a started ServicePair; tests inject faulted
    backends through it.
    """
    if launcher is None:
        def launcher():
            return ServicePair(
                mode="rt", plant_tick_ms=tick_ms, twin_tick_ms=tick_ms, poll_ms=40
            ).start()
    for op in OPERATIONS:
        row = report.operation(op.name)
        passes = 0
        failures: list[tuple[int, int]] = []
        total = config.functional_cycles * config.functional_runs
        for cycle in range(config.functional_cycles):
            try:
                services = launcher()
            except Exception as exc:
                log.error("functional %s cycle %d: launch failed: %s", op.name, cycle, exc)
                failures.extend((cycle, r) for r in range(config.functional_runs))
                continue
            try:
                ctx = BenchContext(
                    "127.0.0.1", services.plant_port, "127.0.0.1", services.bridge_port
                ).open()
                # Restart evidence: a fresh service pair starts near t=0.
                with MirrorClient(port=services.plant_port) as mc:
                    if mc.tick() > 5_000:
                        raise PostconditionError("sim_time not fresh after relaunch")
                for run in range(config.functional_runs):
                    try:
                        op.run(ctx)
                        passes += 1
                    except (PostconditionError, OSError, ConnectionError, ValueError) as exc:
                        failures.append((cycle, run))
                        log.warning(
                            "functional %s cycle %d run %d failed: %s",
                            op.name, cycle, run, exc,
                        )
                ctx.close()
            except Exception as exc:
                log.error("functional %s cycle %d aborted: %s", op.name, cycle, exc)
                done = passes + len(failures)
                remaining = (cycle + 1) * config.functional_runs - done
                failures.extend((cycle, r) for r in range(max(0, remaining)))
            finally:
                services.stop()
        row.functional_passes = passes
        row.functional_total = total
        row.functional_failures = failures
        log.info("functional %-22s %d/%d", op.name, passes, total)
