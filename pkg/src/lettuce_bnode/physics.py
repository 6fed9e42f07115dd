"""Nonlinear lettuce greenhouse model and its fixed-step RK4 discretization.

The continuous-time model couples four states (crop dry-weight, indoor CO2,
indoor temperature, indoor humidity) to three actuators and four weather
disturbances. It serves as the data-generating "true system" for the
identification pipeline. All rates are per second; the working sample period
is carried explicitly in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import DegenerateDenominator, NonFiniteState

PHI_GUARD = 1e-30

CSV_HEADER = "step,time_s,x1,x2,x3,x4,u1,u2,u3,d1,d2,d3,d4"


@dataclass(frozen=True)
class GreenhouseState:
    """State x: dry-weight (kg/m2), CO2 (kg/m3), temperature (degC), humidity (kg/m3)."""

    dry_weight: float
    indoor_co2: float
    indoor_temp: float
    indoor_humidity: float

    def __post_init__(self):
        arr = self.as_array()
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"non-finite state: {arr}")
        if self.dry_weight < 0 or self.indoor_co2 < 0 or self.indoor_humidity < 0:
            raise ValueError(f"negative mass state: {arr}")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.dry_weight, self.indoor_co2, self.indoor_temp, self.indoor_humidity]
        )

    @classmethod
    def from_array(cls, arr) -> "GreenhouseState":
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))


@dataclass(frozen=True)
class ControlInput:
    """Control u: CO2 injection (mg/m2/s), ventilation (mm/s), heating (W/m2)."""

    co2_injection: float
    ventilation: float
    heating: float

    def __post_init__(self):
        arr = self.as_array()
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError(f"invalid control input: {arr}")

    def as_array(self) -> np.ndarray:
        return np.array([self.co2_injection, self.ventilation, self.heating])

    @classmethod
    def from_array(cls, arr) -> "ControlInput":
        return cls(float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class Disturbance:
    """Weather d: radiation (W/m2), outdoor CO2 (kg/m3), temperature (degC), humidity (kg/m3)."""

    radiation: float
    outdoor_co2: float
    outdoor_temp: float
    outdoor_humidity: float

    def __post_init__(self):
        arr = self.as_array()
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"non-finite disturbance: {arr}")
        if self.radiation < 0 or self.outdoor_co2 < 0 or self.outdoor_humidity < 0:
            raise ValueError(f"negative disturbance: {arr}")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.radiation, self.outdoor_co2, self.outdoor_temp, self.outdoor_humidity]
        )

    @classmethod
    def from_array(cls, arr) -> "Disturbance":
        return cls(float(arr[0]), float(arr[1]), float(arr[2]), float(arr[3]))


@dataclass(frozen=True)
class ModelParameters:
    """The 28-entry physics parameter vector.

    p12-p15, p27 and p28 belong to the fuller Van Henten model; they are
    stored for completeness but never used by the rate equations here.
    """

    p1: float
    p2: float
    p3: float
    p4: float
    p5: float
    p6: float
    p7: float
    p8: float
    p9: float
    p10: float
    p11: float
    p12: float
    p13: float
    p14: float
    p15: float
    p16: float
    p17: float
    p18: float
    p19: float
    p20: float
    p21: float
    p22: float
    p23: float
    p24: float
    p25: float
    p26: float
    p27: float
    p28: float

    def __post_init__(self):
        arr = self.as_array()
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite model parameter")
        if self.p9 <= 0 or self.p16 <= 0 or self.p20 <= 0:
            raise ValueError("capacity parameters p9, p16, p20 must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)])

    @classmethod
    def from_array(cls, arr) -> "ModelParameters":
        return cls(*[float(v) for v in arr])

    @classmethod
    def defaults(cls) -> "ModelParameters":
        return cls(
            p1=0.544,
            p2=2.65e-7,
            p3=53.0,
            p4=3.55e-9,
            p5=5.11e-6,
            p6=2.3e-4,
            p7=6.29e-4,
            p8=5.2e-5,
            p9=4.1,
            p10=4.87e-7,
            p11=7.5e-6,
            p12=8.31,
            p13=273.15,
            p14=101325.0,
            p15=0.044,
            p16=3e4,
            p17=1290.0,
            p18=6.1,
            p19=0.2,
            p20=4.1,
            p21=0.0036,
            p22=9348.0,
            p23=8314.0,
            p24=273.15,
            p25=17.4,
            p26=239.0,
            p27=17.269,
            p28=238.3,
        )


INITIAL_STATE = GreenhouseState(0.0035, 0.001, 15.0, 0.008)


@dataclass(frozen=True)
class CanopyFluxes:
    """Photosynthesis, vent CO2/H2O exchange, transpiration and the shared denominator."""

    phot: float
    vent_co2: float
    transp: float
    vent_h2o: float
    phi_denom: float


def canopy_fluxes(
    x: GreenhouseState, u: ControlInput, d: Disturbance, p: ModelParameters
) -> CanopyFluxes:
    """Evaluate the four canopy flux terms at one operating point."""
    light_use = -p.p5 * x.indoor_temp**2 + p.p6 * x.indoor_temp - p.p7
    co2_gap = x.indoor_co2 - p.p8
    phi = p.p4 * d.radiation + light_use * co2_gap
    if abs(phi) < PHI_GUARD:
        raise DegenerateDenominator(f"photosynthesis denominator |phi|={abs(phi)} < {PHI_GUARD}")
    canopy = 1.0 - math.exp(-p.p3 * x.dry_weight)
    phot = canopy * (p.p4 * d.radiation * light_use * co2_gap) / phi
    vent_rate = u.ventilation * 1e-3 + p.p11
    vent_co2 = vent_rate * (x.indoor_co2 - d.outdoor_co2)
    transp = p.p21 * canopy * (
        p.p22
        / (p.p23 * (x.indoor_temp + p.p24))
        * math.exp(p.p25 * x.indoor_temp / (x.indoor_temp + p.p26))
        - x.indoor_humidity
    )
    vent_h2o = vent_rate * (x.indoor_humidity - d.outdoor_humidity)
    return CanopyFluxes(phot, vent_co2, transp, vent_h2o, phi)


def _rhs(x: np.ndarray, u: np.ndarray, d: np.ndarray, p: ModelParameters) -> np.ndarray:
    """State derivative on raw arrays; used by the RK4 stages."""
    x1, x2, x3, x4 = x
    light_use = -p.p5 * x3 * x3 + p.p6 * x3 - p.p7
    co2_gap = x2 - p.p8
    phi = p.p4 * d[0] + light_use * co2_gap
    if abs(phi) < PHI_GUARD:
        raise DegenerateDenominator(f"photosynthesis denominator |phi|={abs(phi)} < {PHI_GUARD}")
    canopy = 1.0 - math.exp(-p.p3 * x1)
    phot = canopy * (p.p4 * d[0] * light_use * co2_gap) / phi
    vent_rate = u[1] * 1e-3 + p.p11
    respiration = x1 * 2.0 ** (x3 / 10.0 - 2.5)
    transp = p.p21 * canopy * (
        p.p22 / (p.p23 * (x3 + p.p24)) * math.exp(p.p25 * x3 / (x3 + p.p26)) - x4
    )
    return np.array(
        [
            p.p1 * phot - p.p2 * respiration,
            (-phot + p.p10 * respiration + u[0] * 1e-6 - vent_rate * (x2 - d[1])) / p.p9,
            (u[2] - (p.p17 * u[1] * 1e-3 + p.p18) * (x3 - d[2]) + p.p19 * d[0]) / p.p16,
            (transp - vent_rate * (x4 - d[3])) / p.p20,
        ]
    )


def derivatives(
    x: GreenhouseState, u: ControlInput, d: Disturbance, p: ModelParameters
) -> np.ndarray:
    """Return (dx1/dt, dx2/dt, dx3/dt, dx4/dt) in each state's units per second."""
    return _rhs(x.as_array(), u.as_array(), d.as_array(), p)


def _rk4_array(
    x: np.ndarray, u: np.ndarray, d: np.ndarray, p: ModelParameters, h: float
) -> np.ndarray:
    k1 = _rhs(x, u, d, p)
    k2 = _rhs(x + 0.5 * h * k1, u, d, p)
    k3 = _rhs(x + 0.5 * h * k2, u, d, p)
    k4 = _rhs(x + h * k3, u, d, p)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_step(
    x: GreenhouseState,
    u: ControlInput,
    d: Disturbance,
    p: ModelParameters,
    h: float,
) -> GreenhouseState:
    """Classic RK4 update over one period with u, d held constant (zero-order hold)."""
    if h < 0:
        raise ValueError("step size must be nonnegative")
    x_next = _rk4_array(x.as_array(), u.as_array(), d.as_array(), p, h)
    return _check_state(x_next, step=None)


def _check_state(arr: np.ndarray, step) -> GreenhouseState:
    if not np.all(np.isfinite(arr)):
        raise NonFiniteState(f"non-finite state {arr}", step=step)
    if arr[0] < 0 or arr[1] < 0 or arr[3] < 0:
        raise NonFiniteState(f"negative mass state {arr}", step=step)
    return GreenhouseState.from_array(arr)


def simulate(
    x0: GreenhouseState,
    u_seq,
    d_seq,
    p: ModelParameters,
    h: float,
) -> list[GreenhouseState]:
    """Roll the model forward over N steps; returns N+1 states starting at x0.

    Per the state-space form the measurement equals the state, so the returned
    trajectory doubles as the measurement sequence.

    u_seq and d_seq may be sequences of ControlInput/Disturbance or arrays of
    shape (N, 3) and (N, 4).
    """
    u_arr = _to_array(u_seq, 3)
    d_arr = _to_array(d_seq, 4)
    if len(u_arr) != len(d_arr):
        raise ValueError("control and disturbance sequences must have equal length")
    if len(u_arr) < 1:
        raise ValueError("need at least one step")
    traj = [x0]
    x = x0.as_array()
    for k in range(len(u_arr)):
        x = _rk4_array(x, u_arr[k], d_arr[k], p, h)
        traj.append(_check_state(x, step=k))
    return traj


def _to_array(seq, width: int) -> np.ndarray:
    if isinstance(seq, np.ndarray):
        arr = seq
    else:
        arr = np.array([s.as_array() if hasattr(s, "as_array") else s for s in seq])
    arr = np.atleast_2d(arr)
    if arr.shape[1] != width:
        raise ValueError(f"expected width {width}, got {arr.shape[1]}")
    return arr


def states_to_array(states) -> np.ndarray:
    return np.array([s.as_array() if hasattr(s, "as_array") else s for s in states])


def export_trajectory_csv(path, states, u_seq, d_seq, period_s: float) -> None:
    """Write a trajectory CSV; floats carry 17 significant digits.

    The final row (step N) has no own control/disturbance sample; the last
    available one is repeated to keep the table rectangular.
    """
    x = states_to_array(states)
    u = _to_array(u_seq, 3)
    d = _to_array(d_seq, 4)
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for k in range(len(x)):
            ku = min(k, len(u) - 1)
            row = [str(k), f"{k * period_s:.17g}"]
            row += [f"{v:.17g}" for v in x[k]]
            row += [f"{v:.17g}" for v in u[ku]]
            row += [f"{v:.17g}" for v in d[ku]]
            fh.write(",".join(row) + "\n")
