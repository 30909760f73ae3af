"""``plantd``: the surrogate plant process behind the mirror protocol."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from ..mirror.server import MODE_LOCKSTEP, MODE_RT, serve_mirror
from .sim import PlantSimulator


def build_parser() -> argparse.ArgumentParser:
    env = os.environ
    p = argparse.ArgumentParser(prog="plantd", description=__doc__)
    p.add_argument("--host", default=env.get("NPPTWIN_PLANT_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(env.get("NPPTWIN_PLANT_PORT", "9100")))
    p.add_argument("--tick-ms", type=int, default=int(env.get("NPPTWIN_PLANT_TICK_MS", "50")))
    p.add_argument(
        "--mode",
        choices=(MODE_RT, MODE_LOCKSTEP),
        default=env.get("NPPTWIN_PLANT_MODE", MODE_RT),
    )
    # Reserved for seeded disturbance scenarios; the base surrogate is
    # deterministic and takes no randomness.
    p.add_argument("--seed", type=int, default=int(env.get("NPPTWIN_PLANT_SEED", "0")))
    p.add_argument("--log-level", default=env.get("NPPTWIN_LOG_LEVEL", "INFO"))
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    if not 1 <= args.tick_ms <= 1000:
        print(f"plantd: --tick-ms must be within 1..1000, got {args.tick_ms}", file=sys.stderr)
        return 2
    sim = PlantSimulator()
    server = serve_mirror(sim, host=args.host, port=args.port,
                          tick_ms=args.tick_ms, mode=args.mode)
    host, port = server.server_address[:2]
    # Single parseable readiness line; launchers wait for it.
    print(f"plantd ready on {host}:{port} mode={args.mode} tick_ms={args.tick_ms}", flush=True)
    try:
        server.serve_forever(poll_interval=0.1)
    except KeyboardInterrupt:
        pass
    finally:
        server.service.shutdown()
        server.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
