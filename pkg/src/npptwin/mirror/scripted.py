"""Scripted stand-in for the plant behind the mirror grammar.

Serves the same registry shape from a value table instead of an ODE
integrator.  Used to prove the twin depends only on the wire contract,
and by the functional harness to verify it actually notices a broken
backend (``fault_after_steps`` pushes values out of range after a number
of steps).
"""

from __future__ import annotations

import threading
from typing import Callable, Mapping, Optional

from ..plant.registry import (
    ReadOnlyVariableError,
    UnknownVariableError,
    build_registry,
)


class ScriptedMirrorBackend:
    def __init__(
        self,
        overrides: Optional[Mapping[str, float]] = None,
        time_fn: Optional[Callable[[str, int], float]] = None,
        fault_after_steps: Optional[int] = None,
    ):
        self.registry = build_registry()
        self._by_name = {d.name: d for d in self.registry}
        self._lock = threading.Lock()
        self._time_fn = time_fn
        self._fault_after = fault_after_steps
        self._steps = 0
        self._sim_time_ms = 0
        values = {}
        for d in self.registry:
            mid = (d.min + d.max) / 2.0
            values[d.name] = mid
        values["sim_time_ms"] = 0.0
        if overrides:
            values.update(overrides)
        self._values = values
        self._snapshot: Mapping[str, float] = dict(values)

    @property
    def snapshot(self) -> Mapping[str, float]:
        return self._snapshot

    @property
    def sim_time_ms(self) -> int:
        return self._sim_time_ms

    def write_var(self, name: str, value: float) -> float:
        desc = self._by_name.get(name)
        if desc is None:
            raise UnknownVariableError(name)
        if not desc.writable:
            raise ReadOnlyVariableError(name)
        applied = desc.clamp(float(value))
        with self._lock:
            self._values[name] = applied
        return applied

    def step(self, dt_ms: int) -> int:
        with self._lock:
            self._steps += 1
            self._sim_time_ms += int(dt_ms)
            self._values["sim_time_ms"] = float(self._sim_time_ms)
            if self._time_fn is not None:
                for name in self._values:
                    if not self._by_name[name].writable and name != "sim_time_ms":
                        self._values[name] = self._time_fn(name, self._sim_time_ms)
            if self._fault_after is not None and self._steps > self._fault_after:
                # Deliberately violate range postconditions.
                for name in ("t_avg_c", "p_sg_mpa", "core_power_mw"):
                    self._values[name] = 1e9
            self._snapshot = dict(self._values)
            return self._sim_time_ms

    def advance(self, total_ms: int, tick_ms: int) -> int:
        whole, rem = divmod(int(total_ms), int(tick_ms))
        for _ in range(whole):
            self.step(tick_ms)
        if rem:
            self.step(rem)
        return self._sim_time_ms


def main(argv=None) -> int:
    """Serve a scripted backend as a drop-in plantd replacement."""
    import argparse

    from .server import serve_mirror

    p = argparse.ArgumentParser(prog="scripted-plantd", description=main.__doc__)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=9100)
    p.add_argument("--tick-ms", type=int, default=50)
    p.add_argument("--mode", choices=("rt", "lockstep"), default="rt")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fault-after-steps", type=int, default=None)
    args = p.parse_args(argv)
    backend = ScriptedMirrorBackend(fault_after_steps=args.fault_after_steps)
    server = serve_mirror(backend, host=args.host, port=args.port,
                          tick_ms=args.tick_ms, mode=args.mode)
    host, port = server.server_address[:2]
    print(f"scripted plantd ready on {host}:{port}", flush=True)
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
