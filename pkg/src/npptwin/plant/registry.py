"""Named scalar registry mirrored over the wire.

The registry is static: 22 physical variables (7 writable control inputs,
7 stored states, 8 derived outputs), 96 read-only temperature probes
(probe_00_c .. probe_95_c), and 100 writable auxiliary setpoint registers
(aux_00 .. aux_99) with no physics coupling, so that batched reads *and*
batched writes of 100 distinct names are both satisfiable without
repeats.  Names are unique, lowercase [a-z0-9_], and listed sorted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

NAME_RE = re.compile(r"^[a-z0-9_]+$")

ACCESS_RO = "ro"
ACCESS_RW = "rw"

PROBE_COUNT = 96
AUX_COUNT = 100

# Largest integer exactly representable as a float; the simulation clock
# lives in the registry like every other scalar.
_MAX_TIME_MS = 2.0**53


class UnknownVariableError(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return self.name


class ReadOnlyVariableError(PermissionError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class VariableDescriptor:
    name: str
    unit: str
    access: str  # ACCESS_RO | ACCESS_RW
    min: float
    max: float

    def __post_init__(self) -> None:
        if not NAME_RE.match(self.name):
            raise ValueError(f"variable name {self.name!r} must match [a-z0-9_]+")
        if self.access not in (ACCESS_RO, ACCESS_RW):
            raise ValueError(f"access must be 'ro' or 'rw', got {self.access!r}")
        if not self.min < self.max:
            raise ValueError(f"{self.name}: min {self.min} must be < max {self.max}")

    @property
    def writable(self) -> bool:
        return self.access == ACCESS_RW

    def clamp(self, value: float) -> float:
        return min(self.max, max(self.min, value))


def _physical() -> list[VariableDescriptor]:
    rw = ACCESS_RW
    ro = ACCESS_RO
    return [
        # Control inputs.
        VariableDescriptor("rod_position", "frac", rw, 0.0, 1.0),
        VariableDescriptor("turbine_throttle", "frac", rw, 0.0, 1.0),
        VariableDescriptor("sg1_feed_valve", "frac", rw, 0.0, 1.0),
        VariableDescriptor("sg2_feed_valve", "frac", rw, 0.0, 1.0),
        VariableDescriptor("rcp1_speed", "frac", rw, 0.0, 1.0),
        VariableDescriptor("rcp2_speed", "frac", rw, 0.0, 1.0),
        VariableDescriptor("cw_inlet_c", "degc", rw, 0.0, 40.0),
        # Stored states.
        VariableDescriptor("core_power_mw", "mw", ro, 0.0, 3300.0),
        VariableDescriptor("t_avg_c", "degc", ro, 100.0, 400.0),
        VariableDescriptor("p_sg_mpa", "mpa", ro, 0.05, 16.0),
        VariableDescriptor("sg1_level_m", "m", ro, 0.0, 16.0),
        VariableDescriptor("sg2_level_m", "m", ro, 0.0, 16.0),
        VariableDescriptor("cond_cw_out_c", "degc", ro, 0.0, 80.0),
        VariableDescriptor("sim_time_ms", "ms", ro, 0.0, _MAX_TIME_MS),
        # Derived outputs (pure functions of state + inputs).
        VariableDescriptor("t_hot_c", "degc", ro, 0.0, 600.0),
        VariableDescriptor("t_cold_c", "degc", ro, -100.0, 600.0),
        VariableDescriptor("pzr_pressure_mpa", "mpa", ro, -5.0, 25.0),
        VariableDescriptor("steam_flow_kgps", "kgps", ro, 0.0, 5000.0),
        VariableDescriptor("sg1_feed_flow_kgps", "kgps", ro, 0.0, 1250.0),
        VariableDescriptor("sg2_feed_flow_kgps", "kgps", ro, 0.0, 1250.0),
        VariableDescriptor("gen_power_mwe", "mwe", ro, 0.0, 2500.0),
    ]


def probe_name(index: int) -> str:
    return f"probe_{index:02d}_c"


def aux_name(index: int) -> str:
    return f"aux_{index:02d}"


def build_registry() -> list[VariableDescriptor]:
    """All descriptors, sorted by name. Deterministic and unique."""
    entries = _physical()
    for i in range(PROBE_COUNT):
        entries.append(VariableDescriptor(probe_name(i), "degc", ACCESS_RO, -100.0, 150.0))
    for i in range(AUX_COUNT):
        entries.append(VariableDescriptor(aux_name(i), "frac", ACCESS_RW, 0.0, 1.0))
    entries.sort(key=lambda d: d.name)
    names = [d.name for d in entries]
    assert len(names) == len(set(names)), "registry names must be unique"
    return entries


# Stored-state registry names, clamped by the simulator after each
# integration step (sim_time_ms is monotone by construction).
STORED_NAMES = (
    "core_power_mw",
    "t_avg_c",
    "p_sg_mpa",
    "sg1_level_m",
    "sg2_level_m",
    "cond_cw_out_c",
)


def registry_map() -> dict[str, VariableDescriptor]:
    return {d.name: d for d in build_registry()}
