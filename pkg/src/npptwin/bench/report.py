"""Report assembly: delimited output, the human table, and figures.

Files written into the output directory:

    speed.csv        operation,runs,mean_ms,p50_ms,p95_ms,max_ms
    resources.csv    phase,process,samples,rss_mean_bytes,rss_max_bytes,
                     cpu_mean_pct,cpu_max_pct
    functional.csv   operation,passes,total,failures
    report.txt       the combined human-readable table with footnotes
    speed_latency.png / resources_timeline.png
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import Optional

from .resources import ProcessSamples
from .timing import Stats

SPEED_COLUMNS = ("operation", "runs", "mean_ms", "p50_ms", "p95_ms", "max_ms")
RESOURCE_COLUMNS = (
    "phase",
    "process",
    "samples",
    "rss_mean_bytes",
    "rss_max_bytes",
    "cpu_mean_pct",
    "cpu_max_pct",
)
FUNCTIONAL_COLUMNS = ("operation", "passes", "total", "failures")

REFERENCE_NOTE = (
    "Reference points from a workstation-class twin stack, informational only,\n"
    "never asserted: batched variable set 18.16 ms, batched get 2.37 ms, read\n"
    "image 27.79 ms, env step 56.70 ms, episode restart 104.98 ms, move 20.93 ms,\n"
    "thermal update 87.62 ms, top-down capture 690.55 ms."
)

FOOTNOTES = (
    "thermal_topdown measures a full-map thermal top-down render, including\n"
    "colormap resolution against the live mirror cache.",
    "topdown_capture_run reports per-image overhead of a multi-capture run;\n"
    "the configured inter-capture delays are subtracted from its totals.",
)


@dataclass
class OperationRow:
    name: str
    stats: Optional[Stats] = None
    rss_mean: Optional[float] = None
    rss_max: Optional[float] = None
    cpu_mean: Optional[float] = None
    cpu_max: Optional[float] = None
    functional_passes: Optional[int] = None
    functional_total: Optional[int] = None
    functional_failures: list = field(default_factory=list)


@dataclass
class ResourcePhase:
    phase: str  # "idle_baseline" | "active"
    processes: list[ProcessSamples]


@dataclass
class BenchReport:
    operations: list[OperationRow] = field(default_factory=list)
    resource_phases: list[ResourcePhase] = field(default_factory=list)
    resource_duration_s: float = 0.0
    notes: list[str] = field(default_factory=list)

    def operation(self, name: str) -> OperationRow:
        for row in self.operations:
            if row.name == name:
                return row
        row = OperationRow(name)
        self.operations.append(row)
        return row


def _fmt_mb(value: Optional[float]) -> str:
    return "-" if value is None else f"{value / (1024 * 1024):.1f} MB"


def _fmt_ms(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.2f} ms"


def _fmt_pct(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.1f}%"


def write_report(report: BenchReport, out_dir: str) -> dict[str, str]:
    """Write all artifacts; returns {artifact_name: path}."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    speed_path = os.path.join(out_dir, "speed.csv")
    with open(speed_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SPEED_COLUMNS)
        for row in report.operations:
            if row.stats is None:
                continue
            writer.writerow(
                [
                    row.name,
                    row.stats.runs,
                    f"{row.stats.mean_ms:.4f}",
                    f"{row.stats.p50_ms:.4f}",
                    f"{row.stats.p95_ms:.4f}",
                    f"{row.stats.max_ms:.4f}",
                ]
            )
    paths["speed_csv"] = speed_path

    resources_path = os.path.join(out_dir, "resources.csv")
    with open(resources_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESOURCE_COLUMNS)
        for phase in report.resource_phases:
            for proc in phase.processes:
                writer.writerow(
                    [
                        phase.phase,
                        proc.name,
                        len(proc.rss_bytes),
                        f"{proc.rss_mean:.0f}",
                        f"{proc.rss_max:.0f}",
                        f"{proc.cpu_mean:.2f}",
                        f"{proc.cpu_max:.2f}",
                    ]
                )
    paths["resources_csv"] = resources_path

    functional_path = os.path.join(out_dir, "functional.csv")
    with open(functional_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(FUNCTIONAL_COLUMNS)
        for row in report.operations:
            if row.functional_total is None:
                continue
            writer.writerow(
                [
                    row.name,
                    row.functional_passes,
                    row.functional_total,
                    ";".join(f"c{c}r{r}" for c, r in row.functional_failures),
                ]
            )
    paths["functional_csv"] = functional_path

    table_path = os.path.join(out_dir, "report.txt")
    with open(table_path, "w", encoding="utf-8") as fh:
        fh.write(render_table(report))
    paths["report_txt"] = table_path

    try:
        paths.update(write_figures(report, out_dir))
    except ImportError:
        report.notes.append("matplotlib unavailable: figures skipped")
    return paths


def _phase(report: BenchReport, name: str) -> Optional[ResourcePhase]:
    for phase in report.resource_phases:
        if phase.phase == name:
            return phase
    return None


def render_table(report: BenchReport) -> str:
    """Combined table: per-operation speed + functional columns, with the
    baseline and active resource rows mirroring the published layout."""
    headers = ("Operation", "Speed Test", "Memory Usage", "CPU Usage", "Functional Test")
    rows = []
    idle = _phase(report, "idle_baseline")
    active = _phase(report, "active")

    def resource_cells(phase: Optional[ResourcePhase]):
        if phase is None or not phase.processes:
            return "-", "-"
        rss = sum(p.rss_mean for p in phase.processes)
        cpu = sum(p.cpu_mean for p in phase.processes)
        rss_max = sum(p.rss_max for p in phase.processes)
        cpu_max = max(p.cpu_max for p in phase.processes)
        return (
            f"{_fmt_mb(rss)} (max {_fmt_mb(rss_max)})",
            f"{_fmt_pct(cpu)} (max {_fmt_pct(cpu_max)})",
        )

    mem, cpu = resource_cells(idle)
    rows.append(("Baseline (idle)", "-", mem, cpu, "-"))
    mem_active, cpu_active = resource_cells(active)
    for row in report.operations:
        functional = "-"
        if row.functional_total:
            pct = 100.0 * (row.functional_passes or 0) / row.functional_total
            functional = (
                f"Passed ({pct:.0f}%)"
                if row.functional_passes == row.functional_total
                else f"{row.functional_passes}/{row.functional_total} ({pct:.0f}%)"
            )
        mem_cell = (
            f"{_fmt_mb(row.rss_mean)} (max {_fmt_mb(row.rss_max)})"
            if row.rss_mean is not None
            else mem_active
        )
        cpu_cell = (
            f"{_fmt_pct(row.cpu_mean)} (max {_fmt_pct(row.cpu_max)})"
            if row.cpu_mean is not None
            else cpu_active
        )
        speed = "-"
        if row.stats is not None:
            speed = (
                f"{_fmt_ms(row.stats.mean_ms)} "
                f"(p50 {_fmt_ms(row.stats.p50_ms)}, p95 {_fmt_ms(row.stats.p95_ms)}, "
                f"max {_fmt_ms(row.stats.max_ms)}, n={row.stats.runs})"
            )
        rows.append((row.name, speed, mem_cell, cpu_cell, functional))

    widths = [max(len(str(r[i])) for r in rows + [headers]) for i in range(len(headers))]

    def line(cells) -> str:
        return " | ".join(str(c).ljust(w) for c, w in zip(cells, widths))

    sep = "-+-".join("-" * w for w in widths)
    out = [line(headers), sep]
    out += [line(r) for r in rows]
    out.append("")
    if report.resource_duration_s:
        out.append(
            f"Resource sampling: 1 Hz for {report.resource_duration_s:.0f} s per phase "
            "(idle baseline and active suite), per process."
        )
    out.append("")
    for note in FOOTNOTES:
        out.append(note)
        out.append("")
    out.append(REFERENCE_NOTE)
    out.append("")
    for note in report.notes:
        out.append(note)
    return "\n".join(out) + "\n"


def write_figures(report: BenchReport, out_dir: str) -> dict[str, str]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    paths = {}
    timed = [r for r in report.operations if r.stats is not None]
    if timed:
        fig, ax = plt.subplots(figsize=(9, 4.2))
        names = [r.name for r in timed]
        means = [r.stats.mean_ms for r in timed]
        p95s = [r.stats.p95_ms for r in timed]
        x = range(len(timed))
        ax.bar(x, means, color="#4878a8", label="mean")
        ax.plot(x, p95s, "k_", markersize=18, label="p95")
        ax.set_xticks(list(x))
        ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
        ax.set_ylabel("latency [ms]")
        ax.set_title("per-operation latency on loopback")
        ax.legend(frameon=False)
        fig.tight_layout()
        path = os.path.join(out_dir, "speed_latency.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths["speed_png"] = path

    active = _phase(report, "active")
    if active is not None and active.processes:
        fig, (ax_rss, ax_cpu) = plt.subplots(2, 1, figsize=(9, 5), sharex=True)
        for proc in active.processes:
            t = range(1, len(proc.rss_bytes) + 1)
            ax_rss.plot(t, [b / (1024 * 1024) for b in proc.rss_bytes], label=proc.name)
            ax_cpu.plot(range(1, len(proc.cpu_pct) + 1), proc.cpu_pct, label=proc.name)
        ax_rss.set_ylabel("RSS [MB]")
        ax_cpu.set_ylabel("CPU [%]")
        ax_cpu.set_xlabel("sample [s]")
        ax_rss.set_title("resource usage during the active suite")
        ax_rss.legend(frameon=False, fontsize=8)
        fig.tight_layout()
        path = os.path.join(out_dir, "resources_timeline.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths["resources_png"] = path
    return paths
