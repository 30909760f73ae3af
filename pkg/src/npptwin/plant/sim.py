"""Single-writer plant simulator with snapshot reads.

All mutation happens in :meth:`PlantSimulator.step` (called by the
real-time ticker or a lockstep ADVANCE handler).  Reads are served from
an immutable snapshot dict rebuilt at every step boundary, so a batched
read can never observe a torn multi-variable state.  Writes clamp to the
registry range, echo the applied value immediately, and take effect at
the next step boundary.
"""

from __future__ import annotations

import threading
from dataclasses import replace
from typing import Callable, Mapping, Optional

from .model import (
    PlantInputs,
    PlantState,
    derived,
    solve_steady_state,
    step_plant,
)
from .params import PlantParams
from .registry import (
    AUX_COUNT,
    PROBE_COUNT,
    ReadOnlyVariableError,
    UnknownVariableError,
    VariableDescriptor,
    aux_name,
    build_registry,
    probe_name,
)

# Maps writable registry names onto PlantInputs fields; (attribute, index)
# with index None for scalars.
_INPUT_FIELDS = {
    "rod_position": ("rod_position", None),
    "turbine_throttle": ("turbine_throttle", None),
    "sg1_feed_valve": ("sg_feed_valve", 0),
    "sg2_feed_valve": ("sg_feed_valve", 1),
    "rcp1_speed": ("rcp_speed", 0),
    "rcp2_speed": ("rcp_speed", 1),
    "cw_inlet_c": ("cw_in_c", None),
}


def nominal_initial_state(params: PlantParams) -> PlantState:
    """Cold-start state: the nominal closed-form operating point."""
    return solve_steady_state(PlantInputs(), params)


class PlantSimulator:
    """Owns the plant state, the write queue, and the read snapshot."""

    def __init__(
        self,
        params: Optional[PlantParams] = None,
        state: Optional[PlantState] = None,
        probe_source: Optional[Callable[[int, PlantState], float]] = None,
    ):
        self.params = params or PlantParams()
        self.registry: list[VariableDescriptor] = build_registry()
        self._by_name = {d.name: d for d in self.registry}
        self._lock = threading.Lock()
        self._state = state if state is not None else nominal_initial_state(self.params)
        self._pending: dict[str, float] = {}
        # probe_source(index, state) -> degC; default mirrors the condenser
        # outlet, the standalone behaviour.
        self._probe_source = probe_source
        self._probe_names = [probe_name(i) for i in range(PROBE_COUNT)]
        self._probe_lo, self._probe_hi = (
            self._by_name[self._probe_names[0]].min,
            self._by_name[self._probe_names[0]].max,
        )
        # aux registers only change on writes; kept as a prebuilt dict so the
        # per-step snapshot is a merge, not 100 format calls.
        self._aux = {aux_name(i): 0.0 for i in range(AUX_COUNT)}
        self._snapshot: Mapping[str, float] = self._build_snapshot(self._state)

    # -- reads ---------------------------------------------------------

    @property
    def snapshot(self) -> Mapping[str, float]:
        """Latest step-boundary snapshot; the dict itself is never mutated."""
        return self._snapshot

    @property
    def state(self) -> PlantState:
        return self._state

    @property
    def sim_time_ms(self) -> int:
        return self._state.sim_time_ms

    def read_var(self, name: str) -> float:
        snap = self._snapshot
        try:
            return snap[name]
        except KeyError:
            raise UnknownVariableError(name) from None

    # -- writes --------------------------------------------------------

    def write_var(self, name: str, value: float) -> float:
        desc = self._by_name.get(name)
        if desc is None:
            raise UnknownVariableError(name)
        if not desc.writable:
            raise ReadOnlyVariableError(name)
        applied = desc.clamp(float(value))
        with self._lock:
            self._pending[name] = applied
        return applied

    # -- stepping ------------------------------------------------------

    def step(self, dt_ms: int) -> int:
        """Apply queued writes, integrate one step, publish a new snapshot.

        Returns the new simulation time in milliseconds.
        """
        with self._lock:
            state = self._apply_pending(self._state)
            state = step_plant(state, dt_ms, self.params)
            state = self._clamp_stored(state)
            self._state = state
            self._snapshot = self._build_snapshot(state)
            return state.sim_time_ms

    def advance(self, total_ms: int, tick_ms: int) -> int:
        """Step ``total_ms`` forward in tick_ms chunks (plus a remainder)."""
        if total_ms < 1:
            raise ValueError(f"advance must be >= 1 ms, got {total_ms}")
        whole, rem = divmod(int(total_ms), int(tick_ms))
        for _ in range(whole):
            self.step(tick_ms)
        if rem:
            self.step(rem)
        return self.sim_time_ms

    # -- internals -----------------------------------------------------

    def _apply_pending(self, state: PlantState) -> PlantState:
        if not self._pending:
            return state
        u = state.inputs
        values = {
            "rod_position": u.rod_position,
            "turbine_throttle": u.turbine_throttle,
            "sg_feed_valve": list(u.sg_feed_valve),
            "rcp_speed": list(u.rcp_speed),
            "cw_in_c": u.cw_in_c,
        }
        for name, value in self._pending.items():
            target = _INPUT_FIELDS.get(name)
            if target is not None:
                attr, idx = target
                if idx is None:
                    values[attr] = value
                else:
                    values[attr][idx] = value
            else:
                # aux_NN scratch registers
                self._aux[name] = value
        self._pending.clear()
        new_inputs = PlantInputs(
            rod_position=values["rod_position"],
            turbine_throttle=values["turbine_throttle"],
            sg_feed_valve=tuple(values["sg_feed_valve"]),
            rcp_speed=tuple(values["rcp_speed"]),
            cw_in_c=values["cw_in_c"],
        )
        return replace(state, inputs=new_inputs)

    def _clamp_stored(self, state: PlantState) -> PlantState:
        b = self._by_name
        return replace(
            state,
            p_mw=b["core_power_mw"].clamp(state.p_mw),
            t_avg_c=b["t_avg_c"].clamp(state.t_avg_c),
            p_sg_mpa=b["p_sg_mpa"].clamp(state.p_sg_mpa),
            l_sg_m=(
                b["sg1_level_m"].clamp(state.l_sg_m[0]),
                b["sg2_level_m"].clamp(state.l_sg_m[1]),
            ),
            cw_out_c=b["cond_cw_out_c"].clamp(state.cw_out_c),
        )

    def _build_snapshot(self, state: PlantState) -> Mapping[str, float]:
        d = derived(state, self.params)
        u = state.inputs
        snap: dict[str, float] = {
            "rod_position": u.rod_position,
            "turbine_throttle": u.turbine_throttle,
            "sg1_feed_valve": u.sg_feed_valve[0],
            "sg2_feed_valve": u.sg_feed_valve[1],
            "rcp1_speed": u.rcp_speed[0],
            "rcp2_speed": u.rcp_speed[1],
            "cw_inlet_c": u.cw_in_c,
            "core_power_mw": state.p_mw,
            "t_avg_c": state.t_avg_c,
            "p_sg_mpa": state.p_sg_mpa,
            "sg1_level_m": state.l_sg_m[0],
            "sg2_level_m": state.l_sg_m[1],
            "cond_cw_out_c": state.cw_out_c,
            "sim_time_ms": float(state.sim_time_ms),
            "t_hot_c": d.t_hot_c,
            "t_cold_c": d.t_cold_c,
            "pzr_pressure_mpa": d.pzr_pressure_mpa,
            "steam_flow_kgps": d.steam_flow_kgps,
            "sg1_feed_flow_kgps": d.feed_flow_kgps[0],
            "sg2_feed_flow_kgps": d.feed_flow_kgps[1],
            "gen_power_mwe": d.gen_power_mwe,
        }
        lo, hi = self._probe_lo, self._probe_hi
        if self._probe_source is None:
            value = min(hi, max(lo, state.cw_out_c))
            for name in self._probe_names:
                snap[name] = value
        else:
            for i, name in enumerate(self._probe_names):
                snap[name] = min(hi, max(lo, self._probe_source(i, state)))
        snap.update(self._aux)
        return snap
