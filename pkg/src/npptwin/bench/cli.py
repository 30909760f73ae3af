"""``nppbench``: the profiling harness CLI.

    nppbench speed      --out DIR [--runs N] [--plant-addr H:P --twin-addr H:P]
    nppbench resources  --out DIR [--resource-duration-s S]
    nppbench functional --out DIR [--functional-cycles N --functional-runs N]
    nppbench all        --out DIR [...]

Without --plant-addr/--twin-addr the harness launches its own service
pair on free loopback ports; the functional protocol always owns its
service lifecycle because restarts are the point.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional

from ..launch import ServicePair
from .ops import BenchContext
from .report import BenchReport, write_report
from .suite import SuiteConfig, _OpSampler, run_functional, run_resources, run_speed

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nppbench", description=__doc__)
    p.add_argument("command", choices=("speed", "resources", "functional", "all"))
    p.add_argument("--out", required=True, help="output directory for the report")
    p.add_argument("--plant-addr", default=None, help="attach to a running plantd (host:port)")
    p.add_argument("--twin-addr", default=None, help="attach to a running twind bridge (host:port)")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--topdown-images", type=int, default=100)
    p.add_argument("--topdown-delay-ms", type=int, default=1000)
    p.add_argument("--resource-duration-s", type=float, default=60.0)
    p.add_argument("--functional-cycles", type=int, default=10)
    p.add_argument("--functional-runs", type=int, default=10)
    p.add_argument("--tick-ms", type=int, default=20)
    p.add_argument("--log-level", default="INFO")
    return p


def _parse_addr(addr: str, default_port: int) -> tuple[str, int]:
    host, _, port = addr.partition(":")
    return host or "127.0.0.1", int(port or default_port)


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(message)s")
    config = SuiteConfig(
        runs=args.runs,
        topdown_images=args.topdown_images,
        topdown_delay_ms=args.topdown_delay_ms,
        resource_duration_s=args.resource_duration_s,
        functional_cycles=args.functional_cycles,
        functional_runs=args.functional_runs,
    )
    report = BenchReport()

    attached = args.plant_addr is not None and args.twin_addr is not None
    services: Optional[ServicePair] = None
    ctx: Optional[BenchContext] = None
    sampler: Optional[_OpSampler] = None
    want_live = args.command in ("speed", "resources", "all")
    try:
        if want_live:
            if attached:
                plant_host, plant_port = _parse_addr(args.plant_addr, 9100)
                twin_host, twin_port = _parse_addr(args.twin_addr, 9000)
            else:
                services = ServicePair(
                    mode="rt",
                    plant_tick_ms=args.tick_ms,
                    twin_tick_ms=args.tick_ms,
                    poll_ms=40,
                ).start()
                plant_host, plant_port = "127.0.0.1", services.plant_port
                twin_host, twin_port = "127.0.0.1", services.bridge_port
            try:
                ctx = BenchContext(plant_host, plant_port, twin_host, twin_port).open()
            except (OSError, ConnectionError) as exc:
                print(
                    f"nppbench: services unreachable at plant {plant_host}:{plant_port} / "
                    f"twin {twin_host}:{twin_port}: {exc}",
                    file=sys.stderr,
                )
                return 2

        if args.command in ("speed", "all"):
            if services is not None:
                sampler = _OpSampler(
                    {"plantd": services.plant_proc.pid, "twind": services.twin_proc.pid}
                ).start()
            run_speed(ctx, report, config, sampler)
            if sampler is not None:
                sampler.stop()
        if args.command in ("resources", "all"):
            if services is None:
                report.notes.append(
                    "resource sampling needs harness-owned services (pids); "
                    "attached mode skips it"
                )
            else:
                run_resources(services, ctx, report, config)
        if args.command in ("functional", "all"):
            run_functional(report, config, tick_ms=args.tick_ms)
    finally:
        if ctx is not None:
            ctx.close()
        if services is not None:
            services.stop()

    paths = write_report(report, args.out)
    with open(paths["report_txt"], encoding="utf-8") as fh:
        print(fh.read())
    print("artifacts:")
    for name, path in sorted(paths.items()):
        print(f"  {name}: {path}")
    failures = [
        row
        for row in report.operations
        if row.functional_total and row.functional_passes != row.functional_total
    ]
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
