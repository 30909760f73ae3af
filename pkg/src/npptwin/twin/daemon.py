"""``twind``: the twin process serving the bridge and the web gateway."""

from __future__ import annotations

import argparse
import logging
import os
import threading

from ..env.episode import EnvConfig
from .bridge import serve_bridge
from .core import DEFAULT_ROBOTS, MODE_LOCKSTEP, MODE_RT, TwinConfig, TwinServer
from .gateway import serve_gateway


def _env(name: str, default: str) -> str:
    return os.environ.get(f"NPPTWIN_{name}", default)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twind", description=__doc__)
    p.add_argument("--bridge-port", type=int, default=int(_env("BRIDGE_PORT", "9000")))
    p.add_argument("--http-port", type=int, default=int(_env("HTTP_PORT", "8080")))
    p.add_argument("--host", default=_env("HOST", "127.0.0.1"))
    p.add_argument("--plant-addr", default=_env("PLANT_ADDR", "127.0.0.1:9100"),
                   help="host:port of the plant mirror server")
    p.add_argument("--map", dest="map_path", default=_env("MAP", "") or None)
    p.add_argument("--tick-ms", type=int, default=int(_env("TICK_MS", "50")))
    p.add_argument("--mode", choices=(MODE_RT, MODE_LOCKSTEP), default=_env("MODE", MODE_RT))
    p.add_argument("--seed", type=int, default=int(_env("SEED", "0")))
    p.add_argument("--record-dir", default=_env("RECORD_DIR", "") or None)
    p.add_argument("--topdown-interval-ms", type=int,
                   default=int(_env("TOPDOWN_INTERVAL_MS", "1000")))
    p.add_argument("--poll-ms", type=int, default=int(_env("POLL_MS", "100")))
    p.add_argument("--assets-dir", default=_env("ASSETS_DIR", "") or None)
    p.add_argument("--robots", default=_env("ROBOTS", DEFAULT_ROBOTS),
                   help="comma list of id:kind:spawn")
    p.add_argument("--env-robot", default=_env("ENV_ROBOT", "r1"))
    p.add_argument("--env-max-steps", type=int, default=int(_env("ENV_MAX_STEPS", "500")))
    p.add_argument("--obs-width", type=int, default=int(_env("OBS_WIDTH", "256")))
    p.add_argument("--obs-height", type=int, default=int(_env("OBS_HEIGHT", "144")))
    p.add_argument("--obs-mode", choices=("lit", "thermal"), default=_env("OBS_MODE", "lit"))
    p.add_argument("--log-level", default=_env("LOG_LEVEL", "INFO"))
    return p


def config_from_args(args) -> TwinConfig:
    plant_host, _, plant_port = args.plant_addr.partition(":")
    return TwinConfig(
        bridge_host=args.host,
        bridge_port=args.bridge_port,
        http_host=args.host,
        http_port=args.http_port,
        plant_host=plant_host or "127.0.0.1",
        plant_port=int(plant_port or "9100"),
        map_path=args.map_path,
        tick_ms=args.tick_ms,
        mode=args.mode,
        seed=args.seed,
        record_dir=args.record_dir,
        topdown_interval_ms=args.topdown_interval_ms,
        poll_ms=args.poll_ms,
        assets_dir=args.assets_dir,
        robots=args.robots,
        env=EnvConfig(
            robot_id=args.env_robot,
            max_steps=args.env_max_steps,
            obs_width=args.obs_width,
            obs_height=args.obs_height,
            obs_mode=args.obs_mode,
        ),
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    config = config_from_args(args)
    twin = TwinServer(config)
    twin.start()
    bridge = serve_bridge(twin, host=config.bridge_host, port=config.bridge_port)
    gateway = serve_gateway(
        twin, host=config.http_host, port=config.http_port, assets_dir=config.assets_dir
    )
    bridge_thread = threading.Thread(
        target=bridge.serve_forever, kwargs={"poll_interval": 0.1}, daemon=True
    )
    bridge_thread.start()
    print(
        f"twind ready bridge={bridge.server_address[0]}:{bridge.server_address[1]} "
        f"http={gateway.server_address[0]}:{gateway.server_address[1]} "
        f"mode={config.mode} tick_ms={config.tick_ms}",
        flush=True,
    )
    try:
        gateway.serve_forever(poll_interval=0.1)
    except KeyboardInterrupt:
        pass
    finally:
        bridge.shutdown()
        bridge.server_close()
        gateway.server_close()
        twin.stop()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
