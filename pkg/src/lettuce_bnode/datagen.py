"""Scenario generation: weather-driven control policy plus true-model rollouts."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from . import physics, weather
from .errors import GreenhouseError
from .physics import ControlInput, Disturbance, GreenhouseState, ModelParameters
from .weather import WeatherProfile, WeatherSeries


@dataclass(frozen=True)
class Scenario:
    """One simulated {states, controls, disturbances} sequence.

    states has one more row than controls/disturbances (includes the initial
    state).
    """

    index: int
    states: np.ndarray        # (N+1, 4)
    controls: np.ndarray      # (N, 3)
    disturbances: np.ndarray  # (N, 4)
    period_s: float

    def __post_init__(self):
        if len(self.states) != len(self.controls) + 1 or len(self.controls) != len(
            self.disturbances
        ):
            raise ValueError("inconsistent scenario lengths")

    @property
    def n_steps(self) -> int:
        return len(self.controls)


def control_policy(d: Disturbance) -> ControlInput:
    """CO2 injection and heating track radiation; ventilation only at night."""
    u1 = d.radiation / 10.0
    u2 = 0.0 if d.radiation > 1.0 else 0.1
    u3 = 20.0 + d.radiation / 5.0
    return ControlInput(u1, u2, u3)


def control_policy_array(d_arr: np.ndarray) -> np.ndarray:
    """Vectorized control policy over a (N, 4) disturbance array."""
    rad = d_arr[:, 0]
    u = np.empty((len(d_arr), 3))
    u[:, 0] = rad / 10.0
    u[:, 1] = np.where(rad > 1.0, 0.0, 0.1)
    u[:, 2] = 20.0 + rad / 5.0
    return u


def derive_seed(root_seed: int, index: int) -> int:
    """Stable per-scenario seed from a root seed."""
    return int(np.random.SeedSequence([root_seed, index]).generate_state(1)[0])


def scenario_from_weather(
    index: int, series: WeatherSeries, p: ModelParameters, x0: GreenhouseState
) -> Scenario:
    u = control_policy_array(series.samples)
    try:
        states = physics.simulate(x0, u, series.samples, p, series.period_s)
    except GreenhouseError as exc:
        raise type(exc)(f"scenario {index}: {exc}") from exc
    return Scenario(
        index=index,
        states=physics.states_to_array(states),
        controls=u,
        disturbances=series.samples,
        period_s=series.period_s,
    )


def generate_scenarios(
    n_scenarios: int,
    days: int,
    period_s: float,
    root_seed: int,
    p: ModelParameters,
    x0: GreenhouseState,
    profile: WeatherProfile | None = None,
    real_weather: WeatherSeries | None = None,
) -> list[Scenario]:
    """Generate scenarios, each with its own derived-seed weather draw.

    When real_weather is given, scenario j instead takes a window starting
    j days into the series (windows overlap by design so a modest record
    yields several scenarios).
    """
    if n_scenarios < 1:
        raise ValueError("need at least one scenario")
    scenarios = []
    n_steps = days * weather.DAY_S // int(period_s)
    for j in range(n_scenarios):
        if real_weather is not None:
            series = _slice_real(real_weather, j, n_steps, period_s)
        else:
            series = weather.synth_weather(days, period_s, derive_seed(root_seed, j), profile)
        scenarios.append(scenario_from_weather(j, series, p, x0))
    return scenarios


def _slice_real(series: WeatherSeries, j: int, n_steps: int, period_s: float) -> WeatherSeries:
    if abs(series.period_s - period_s) > 1e-9:
        series = weather.resample(series, period_s)
    shift = weather.DAY_S // int(period_s)
    start = j * shift
    if start + n_steps > len(series):
        raise ValueError(
            f"weather record too short for scenario {j}: "
            f"need {start + n_steps} samples, have {len(series)}"
        )
    return WeatherSeries(
        period_s, series.samples[start : start + n_steps], f"{series.source_tag}[{start}:]"
    )


def parameter_hash(p: ModelParameters) -> str:
    payload = ",".join(f"{v:.17g}" for v in p.as_array())
    return hashlib.sha256(payload.encode()).hexdigest()


def export_scenarios(out_dir, scenarios: list[Scenario], root_seed: int, days: int,
                     p: ModelParameters) -> None:
    """Write one trajectory CSV per scenario plus a JSON manifest."""
    manifest = {
        "root_seed": root_seed,
        "days": days,
        "period_s": scenarios[0].period_s,
        "n_scenarios": len(scenarios),
        "seeds": [derive_seed(root_seed, s.index) for s in scenarios],
        "parameter_hash": parameter_hash(p),
        "files": [f"scenario_{s.index:03d}.csv" for s in scenarios],
    }
    for s in scenarios:
        physics.export_trajectory_csv(
            f"{out_dir}/scenario_{s.index:03d}.csv",
            s.states,
            s.controls,
            s.disturbances,
            s.period_s,
        )
    with open(f"{out_dir}/manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
