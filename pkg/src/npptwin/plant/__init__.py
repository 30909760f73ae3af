from .params import PlantParams
from .model import (
    PlantInputs,
    PlantState,
    Derived,
    t_sat,
    derivatives,
    derived,
    step_plant,
    solve_steady_state,
    SaturationDomainError,
    NoSteadyStateError,
    TimestepError,
)
from .registry import (
    VariableDescriptor,
    build_registry,
    UnknownVariableError,
    ReadOnlyVariableError,
)
from .sim import PlantSimulator

__all__ = [
    "PlantParams",
    "PlantInputs",
    "PlantState",
    "Derived",
    "t_sat",
    "derivatives",
    "derived",
    "step_plant",
    "solve_steady_state",
    "SaturationDomainError",
    "NoSteadyStateError",
    "TimestepError",
    "VariableDescriptor",
    "build_registry",
    "UnknownVariableError",
    "ReadOnlyVariableError",
    "PlantSimulator",
]
