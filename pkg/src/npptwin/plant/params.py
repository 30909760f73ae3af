"""Tunable physical constants for the lumped-parameter PWR surrogate.

The defaults place the nominal operating point at a 3000 MW_th /
~1000 MW_e four-loop PWR whose steady state is solvable by hand:

    rod = 1, throttle = 1, feed = 0.8, pumps = 1, cw_in = 20 degC
    =>  P = 3000 MW_th, W_s = 2000 kg/s, p_sg = 6.9 MPa,
        t_avg = t_sat(6.9) + 30 ~= 317.3 degC, gen = 1000 MW_e

Changing any constant moves the gains and time constants of the whole
loop; the closed-form solver in :mod:`npptwin.plant.model` tracks the
same algebra, so the integrator/oracle agreement tests keep holding for
any positive parameter set.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class PlantParams:
    p_max: float = 3000.0        # thermal power ceiling [MW_th]
    tau_p: float = 10.0          # core power lag [s]
    u_heat: float = 100_000.0    # SG heat-transfer coefficient [kW/degC]
    h_fg: float = 1500.0         # latent heat of vaporization [kJ/kg]
    k_t: float = 289.855         # turbine admittance [kg/s per MPa]
    dh_t: float = 500.0          # turbine specific work [kJ/kg]
    c_pri: float = 1.35e6        # primary lumped heat capacity [kJ/degC]
    mdot_p_nom: float = 17000.0  # nominal primary loop flow [kg/s]
    c_p_pri: float = 5.4         # primary coolant specific heat [kJ/kg.degC]
    w_f_max: float = 1250.0      # max feedwater flow per SG [kg/s]
    rho_sg: float = 740.0        # SG water density [kg/m3]
    a_sg: float = 20.0           # SG free-surface area [m2]
    k_pv: float = 5e-5           # SG pressure gain [MPa.s/kg]
    mdot_cw: float = 80_000.0    # circulating-water flow [kg/s]
    c_p_w: float = 4.18          # water specific heat [kJ/kg.degC]
    k_pzr: float = 0.08          # pressurizer pressure coefficient [MPa/degC]
    t_avg_nom: float = 317.3     # reference average temperature [degC]

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ValueError(
                    f"plant parameter {f.name} must be strictly positive, got {value!r}"
                )
