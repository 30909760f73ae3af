"""ODE core of the PWR surrogate.

Stored (integrated) state:

    p_mw       core thermal power [MW_th], first-order lag toward rod demand
    t_avg_c    lumped primary average temperature [degC]
    p_sg_mpa   steam generator secondary pressure [MPa], shared by both SGs
    l_sg_m     two SG narrow-range levels [m], pure mass-balance integrators
    cw_out_c   circulating-water outlet temperature [degC]

Control inputs (held constant between integration steps):

    rod_position      [0,1] scales power demand
    turbine_throttle  [0,1] scales steam draw
    sg_feed_valve     [0,1] per SG, scales feedwater flow
    rcp_speed         [0,1] per pump, mean scales primary-to-SG heat transfer
    cw_in_c           circulating-water inlet temperature [degC]

The energy path is:  rod demand -> core power P -> primary temperature
t_avg -> SG heat Q = U*pump*(t_avg - t_sat(p_sg)) -> boil-off Q/h_fg vs
turbine draw W_s = k_t*throttle*p_sg -> secondary pressure.  Everything
downstream (levels, generator output, condenser outlet) is bookkeeping on
W_s.  All closures are smooth and monotone so the steady state is a small
triangular algebra problem, solved exactly by :func:`solve_steady_state`.

Integration is classical fixed-step RK4.  No adaptive stepping, no
internal randomness: identical inputs give bitwise-identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .params import PlantParams

ATMOSPHERIC_MPA = 0.101325

# Condenser outlet relaxation time constant [s].
CW_RELAX_TAU_S = 20.0

# Indeterminate levels (pure integrators) reported by the steady-state
# solver default to the nominal mid-range mark.
NOMINAL_SG_LEVEL_M = 12.0


class SaturationDomainError(ValueError):
    """Saturation temperature requested for a non-positive pressure."""


class NoSteadyStateError(ValueError):
    """The closed-form steady state does not exist for these inputs."""


class TimestepError(ValueError):
    """Integration step outside the allowed 1..1000 ms window."""


def t_sat(p_mpa: float) -> float:
    """Saturation temperature [degC] for pressure [MPa].

    Quarter-power law anchored at the atmospheric boiling point:
    100 * (p / 0.101325) ** 0.25.  Monotone, smooth, and trivially
    invertible, which is all the surrogate needs from a steam table.
    """
    if not p_mpa > 0:
        raise SaturationDomainError(f"pressure must be > 0 MPa, got {p_mpa!r}")
    return 100.0 * (p_mpa / ATMOSPHERIC_MPA) ** 0.25


@dataclass(frozen=True)
class PlantInputs:
    rod_position: float = 1.0
    turbine_throttle: float = 1.0
    sg_feed_valve: tuple[float, float] = (0.8, 0.8)
    rcp_speed: tuple[float, float] = (1.0, 1.0)
    cw_in_c: float = 20.0


@dataclass(frozen=True)
class PlantState:
    p_mw: float
    t_avg_c: float
    p_sg_mpa: float
    l_sg_m: tuple[float, float]
    cw_out_c: float
    sim_time_ms: int = 0
    inputs: PlantInputs = field(default_factory=PlantInputs)


@dataclass(frozen=True)
class Derivatives:
    """Time derivatives of the stored state, per second of simulation."""

    p_mw: float
    t_avg_c: float
    p_sg_mpa: float
    l_sg_m: tuple[float, float]
    cw_out_c: float


@dataclass(frozen=True)
class Derived:
    """Pure functions of state + inputs; never stored independently."""

    q_sg_kw: float
    steam_flow_kgps: float
    feed_flow_kgps: tuple[float, float]
    gen_power_mwe: float
    t_hot_c: float
    t_cold_c: float
    pzr_pressure_mpa: float


def _mean2(pair: tuple[float, float]) -> float:
    return (pair[0] + pair[1]) / 2.0


def derived(state: PlantState, params: PlantParams) -> Derived:
    u = state.inputs
    pump = _mean2(u.rcp_speed)
    q_sg = params.u_heat * pump * max(0.0, state.t_avg_c - t_sat(state.p_sg_mpa))
    w_s = params.k_t * u.turbine_throttle * state.p_sg_mpa
    w_f = (params.w_f_max * u.sg_feed_valve[0], params.w_f_max * u.sg_feed_valve[1])
    gen = w_s * params.dh_t / 1000.0
    if pump > 0.0:
        # The pump factor appears in both q_sg and the denominator, so the
        # loop delta-T stays bounded as flow goes to zero.
        dt_loop = q_sg / (2.0 * params.mdot_p_nom * pump * params.c_p_pri)
    else:
        dt_loop = 0.0
    pzr = 15.5 + params.k_pzr * (state.t_avg_c - params.t_avg_nom)
    return Derived(
        q_sg_kw=q_sg,
        steam_flow_kgps=w_s,
        feed_flow_kgps=w_f,
        gen_power_mwe=gen,
        t_hot_c=state.t_avg_c + dt_loop,
        t_cold_c=state.t_avg_c - dt_loop,
        pzr_pressure_mpa=pzr,
    )


def derivatives(state: PlantState, params: PlantParams) -> Derivatives:
    u = state.inputs
    d = derived(state, params)

    dp = (params.p_max * u.rod_position - state.p_mw) / params.tau_p
    # 1000*P converts MW_th to kW to match q_sg.
    dt_avg = (1000.0 * state.p_mw - d.q_sg_kw) / params.c_pri
    dp_sg = params.k_pv * (d.q_sg_kw / params.h_fg - d.steam_flow_kgps)
    denom = params.rho_sg * params.a_sg
    dl = (
        (d.feed_flow_kgps[0] - d.steam_flow_kgps / 2.0) / denom,
        (d.feed_flow_kgps[1] - d.steam_flow_kgps / 2.0) / denom,
    )
    cw_target = u.cw_in_c + d.steam_flow_kgps * (params.h_fg - params.dh_t) / (
        params.mdot_cw * params.c_p_w
    )
    dcw = (cw_target - state.cw_out_c) / CW_RELAX_TAU_S
    return Derivatives(p_mw=dp, t_avg_c=dt_avg, p_sg_mpa=dp_sg, l_sg_m=dl, cw_out_c=dcw)


def _as_vector(state: PlantState) -> tuple[float, ...]:
    return (
        state.p_mw,
        state.t_avg_c,
        state.p_sg_mpa,
        state.l_sg_m[0],
        state.l_sg_m[1],
        state.cw_out_c,
    )


def _with_vector(state: PlantState, y: tuple[float, ...]) -> PlantState:
    return replace(
        state,
        p_mw=y[0],
        t_avg_c=y[1],
        p_sg_mpa=y[2],
        l_sg_m=(y[3], y[4]),
        cw_out_c=y[5],
    )


def _deriv_vector(state: PlantState, y: tuple[float, ...], params: PlantParams) -> tuple[float, ...]:
    d = derivatives(_with_vector(state, y), params)
    return (d.p_mw, d.t_avg_c, d.p_sg_mpa, d.l_sg_m[0], d.l_sg_m[1], d.cw_out_c)


def step_plant(state: PlantState, dt_ms: int, params: PlantParams) -> PlantState:
    """Advance one fixed RK4 step of ``dt_ms`` milliseconds.

    Range clamping of the stored fields is the caller's job (the
    simulator owns the registry); this function is the bare integrator
    plus the simulation clock.
    """
    if not 1 <= dt_ms <= 1000:
        raise TimestepError(f"dt_ms must be within 1..1000, got {dt_ms!r}")
    h = dt_ms / 1000.0
    y0 = _as_vector(state)
    k1 = _deriv_vector(state, y0, params)
    y1 = tuple(a + 0.5 * h * b for a, b in zip(y0, k1))
    k2 = _deriv_vector(state, y1, params)
    y2 = tuple(a + 0.5 * h * b for a, b in zip(y0, k2))
    k3 = _deriv_vector(state, y2, params)
    y3 = tuple(a + h * b for a, b in zip(y0, k3))
    k4 = _deriv_vector(state, y3, params)
    yn = tuple(
        a + (h / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
        for a, b1, b2, b3, b4 in zip(y0, k1, k2, k3, k4)
    )
    out = _with_vector(state, yn)
    return replace(out, sim_time_ms=state.sim_time_ms + int(dt_ms))


def solve_steady_state(
    inputs: PlantInputs,
    params: PlantParams,
    levels: tuple[float, float] = (NOMINAL_SG_LEVEL_M, NOMINAL_SG_LEVEL_M),
) -> PlantState:
    """Closed-form fixed point of the ODE set, used as the test oracle.

    Solves, in order:  P = p_max*rod;  Q = 1000*P (primary energy
    balance);  W_s = Q/h_fg (secondary pressure balance);
    p_sg = W_s/(k_t*throttle);  t_avg = t_sat(p_sg) + Q/(u_heat*pump);
    cw_out = cw_in + W_s*(h_fg - dh_t)/(mdot_cw*c_p_w).

    The SG levels are pure integrators with no restoring force, so any
    level is a fixed point once the feed valves balance the boil-off;
    the ``levels`` argument names the level pair to report.
    """
    u = inputs
    pump = _mean2(u.rcp_speed)
    if not u.rod_position > 0:
        raise NoSteadyStateError("rod_position must be > 0 for a steady state")
    if not u.turbine_throttle > 0:
        raise NoSteadyStateError("turbine_throttle must be > 0 for a steady state")
    if not pump > 0:
        raise NoSteadyStateError("mean rcp_speed must be > 0 for a steady state")
    p = params.p_max * u.rod_position
    q = 1000.0 * p
    w_s = q / params.h_fg
    p_sg = w_s / (params.k_t * u.turbine_throttle)
    t_avg = t_sat(p_sg) + q / (params.u_heat * pump)
    cw_out = u.cw_in_c + w_s * (params.h_fg - params.dh_t) / (
        params.mdot_cw * params.c_p_w
    )
    return PlantState(
        p_mw=p,
        t_avg_c=t_avg,
        p_sg_mpa=p_sg,
        l_sg_m=levels,
        cw_out_c=cw_out,
        sim_time_ms=0,
        inputs=inputs,
    )


def balancing_feed_valve(inputs: PlantInputs, params: PlantParams) -> float:
    """Feed valve position that exactly balances steady boil-off per SG."""
    steady = solve_steady_state(inputs, params)
    w_s = derived(steady, params).steam_flow_kgps
    return (w_s / 2.0) / params.w_f_max
