"""Per-tick robot pose logging to memory and CSV."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Optional

from .robots import RobotState

log = logging.getLogger(__name__)

TRACE_HEADER = "t_ms,robot_id,x_m,y_m,z_m,yaw_deg"


@dataclass(frozen=True)
class TraceRecord:
    t_ms: int
    robot_id: str
    x_m: float
    y_m: float
    z_m: float
    yaw_deg: float


def format_trace_row(rec: TraceRecord) -> str:
    return (
        f"{rec.t_ms},{rec.robot_id},"
        f"{rec.x_m:.3f},{rec.y_m:.3f},{rec.z_m:.3f},{rec.yaw_deg:.3f}"
    )


class TraceLog:
    """In-memory trace with an optional per-robot CSV sink.

    A sink write failure disables CSV recording (with a warning) but the
    in-memory log and the simulation keep going.
    """

    def __init__(self, directory: Optional[str] = None):
        self.directory = directory
        self._rows: dict[str, list[TraceRecord]] = {}
        self._files: dict[str, object] = {}
        self.sink_disabled = False
        if directory is not None:
            os.makedirs(directory, exist_ok=True)

    def csv_path(self, robot_id: str) -> Optional[str]:
        if self.directory is None:
            return None
        return os.path.join(self.directory, f"trace_{robot_id}.csv")

    def rows(self, robot_id: str) -> list[TraceRecord]:
        return self._rows.get(robot_id, [])

    def points(self, robot_id: str) -> list[tuple[float, float]]:
        return [(r.x_m, r.y_m) for r in self.rows(robot_id)]

    def record(self, robot: RobotState, t_ms: int) -> Optional[TraceRecord]:
        if not robot.trace_enabled:
            return None
        rec = TraceRecord(t_ms, robot.id, robot.x_m, robot.y_m, robot.z_m, robot.yaw_deg)
        self._rows.setdefault(robot.id, []).append(rec)
        self._write_row(robot.id, rec)
        return rec

    def truncate(self, robot_id: str) -> None:
        self._rows[robot_id] = []
        fh = self._files.pop(robot_id, None)
        if fh is not None:
            try:
                fh.close()
            except OSError:
                pass
        path = self.csv_path(robot_id)
        if path is not None and not self.sink_disabled:
            try:
                with open(path, "w", encoding="utf-8", newline="") as out:
                    out.write(TRACE_HEADER + "\n")
            except OSError as exc:
                self._disable_sink(exc)

    def close(self) -> None:
        for fh in self._files.values():
            try:
                fh.close()
            except OSError:
                pass
        self._files.clear()

    def _write_row(self, robot_id: str, rec: TraceRecord) -> None:
        if self.directory is None or self.sink_disabled:
            return
        try:
            fh = self._files.get(robot_id)
            if fh is None:
                path = self.csv_path(robot_id)
                new = not os.path.exists(path) or os.path.getsize(path) == 0
                fh = open(path, "a", encoding="utf-8", newline="")
                self._files[robot_id] = fh
                if new:
                    fh.write(TRACE_HEADER + "\n")
            fh.write(format_trace_row(rec) + "\n")
            fh.flush()
        except (OSError, ValueError) as exc:
            # ValueError: write on a handle the OS already invalidated.
            self._disable_sink(exc)

    def _disable_sink(self, exc: Exception) -> None:
        self.sink_disabled = True
        log.warning("trace CSV sink failed, recording to disk disabled: %s", exc)
