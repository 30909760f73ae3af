from .timing import Stats, measure_ms, busy_wait_ms
from .report import BenchReport, OperationRow, ResourcePhase, write_report

__all__ = [
    "Stats",
    "measure_ms",
    "busy_wait_ms",
    "BenchReport",
    "OperationRow",
    "ResourcePhase",
    "write_report",
]
