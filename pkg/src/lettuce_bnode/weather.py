"""Disturbance (weather) sequences: synthetic diurnal generator, CSV loader, resampling.

The synthetic generator stands in for measured data: clipped sinusoidal
radiation, sinusoidal outdoor temperature and humidity, near-constant outdoor
CO2, all with seedable Gaussian noise. Channel order throughout matches the
Disturbance fields: radiation, outdoor CO2, outdoor temperature, humidity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import (
    IncompatiblePeriods,
    InvalidProfile,
    IrregularPeriod,
    NonMonotoneTime,
    ParseError,
)
from .physics import Disturbance

CSV_COLUMNS = ["time_s", "rad_Wm2", "co2_kgm3", "temp_C", "hum_kgm3"]

DAY_S = 86400


@dataclass(frozen=True)
class WeatherProfile:
    """Amplitudes, means and noise levels for the synthetic diurnal generator.

    Defaults bracket the visible ranges of typical Dutch greenhouse weather:
    radiation peaking at a few hundred W/m2, outdoor temperature around
    5-20 degC, CO2 near 8e-4 kg/m3, humidity near 5e-3 kg/m3.
    """

    radiation_amplitude: float = 400.0
    radiation_noise: float = 15.0
    temp_mean: float = 12.0
    temp_amplitude: float = 6.0
    temp_noise: float = 0.5
    co2_mean: float = 8e-4
    co2_noise: float = 2e-5
    humidity_mean: float = 5e-3
    humidity_amplitude: float = 1e-3
    humidity_noise: float = 1e-4
    sunrise_offset_s: float = 21600.0

    def validate(self):
        if self.radiation_amplitude < 0:
            raise InvalidProfile("radiation amplitude must be nonnegative")
        if self.co2_mean <= 0:
            raise InvalidProfile("outdoor CO2 mean must be positive")
        if self.humidity_mean - self.humidity_amplitude <= 0:
            raise InvalidProfile("humidity sinusoid must stay positive")
        for name in ("radiation_noise", "temp_noise", "co2_noise", "humidity_noise"):
            if getattr(self, name) < 0:
                raise InvalidProfile(f"{name} must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "WeatherProfile":
        return cls(**d)


@dataclass(frozen=True)
class WeatherSeries:
    """A regularly-sampled disturbance stream in d-channel order (N, 4)."""

    period_s: float
    samples: np.ndarray
    source_tag: str = ""

    def __post_init__(self):
        if self.period_s <= 0:
            raise ValueError("period must be positive")
        if len(self.samples) == 0:
            raise ValueError("samples must be nonempty")

    def __len__(self) -> int:
        return len(self.samples)

    def disturbance(self, k: int) -> Disturbance:
        return Disturbance.from_array(self.samples[k])


def synth_weather(
    days: int, period_s: float, seed: int, profile: WeatherProfile | None = None
) -> WeatherSeries:
    """Generate a seeded synthetic weather series of `days` * 24 h.

    With all noise levels zero the series is exactly 24-hour periodic and
    radiation is exactly zero during the night half-period.
    """
    if profile is None:
        profile = WeatherProfile()
    profile.validate()
    if days < 1:
        raise ValueError("days must be >= 1")
    if DAY_S % int(period_s) != 0:
        raise ValueError("period must divide 86400 s")
    n = days * DAY_S // int(period_s)
    rng = np.random.default_rng(seed)
    t = np.arange(n) * float(period_s)
    # Phase from time-of-day so zero-noise output is bit-identical day to day.
    phase = ((t - profile.sunrise_offset_s) % DAY_S) / DAY_S
    wave = np.sin(2.0 * np.pi * phase)

    rad_base = np.maximum(0.0, profile.radiation_amplitude * wave)
    rad_noise = rng.normal(0.0, 1.0, n) * profile.radiation_noise
    rad = np.where(rad_base > 0.0, np.maximum(0.0, rad_base + rad_noise), 0.0)

    co2 = np.maximum(0.0, profile.co2_mean + rng.normal(0.0, 1.0, n) * profile.co2_noise)
    temp = profile.temp_mean + profile.temp_amplitude * wave
    temp = temp + rng.normal(0.0, 1.0, n) * profile.temp_noise
    hum = profile.humidity_mean + profile.humidity_amplitude * wave
    hum = np.maximum(0.0, hum + rng.normal(0.0, 1.0, n) * profile.humidity_noise)

    samples = np.column_stack([rad, co2, temp, hum])
    return WeatherSeries(float(period_s), samples, source_tag=f"synthetic:{seed}")


def load_weather_csv(path) -> WeatherSeries:
    """Load a weather CSV with header time_s,rad_Wm2,co2_kgm3,temp_C,hum_kgm3.

    The sample period is inferred from the first two timestamps; every further
    gap must stay within 1% of it.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        if [c.strip() for c in header] != CSV_COLUMNS:
            raise ParseError(f"{path}: bad header {header!r}, expected {CSV_COLUMNS}")
        times = []
        rows = []
        for i, row in enumerate(reader, start=2):
            if len(row) != 5:
                raise ParseError(f"{path}: row {i}: expected 5 columns, got {len(row)}")
            vals = []
            for col, cell in zip(CSV_COLUMNS, row):
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise ParseError(f"{path}: row {i}, column {col}: not a number: {cell!r}") from None
            t, rad, co2, temp, hum = vals
            for col, v in (("rad_Wm2", rad), ("co2_kgm3", co2), ("hum_kgm3", hum)):
                if v < 0:
                    raise ParseError(f"{path}: row {i}, column {col}: negative value {v}")
            times.append(t)
            rows.append([rad, co2, temp, hum])
    if len(rows) < 2:
        raise ParseError(f"{path}: need at least 2 data rows")
    times = np.array(times)
    gaps = np.diff(times)
    if np.any(gaps <= 0):
        bad = int(np.argmax(gaps <= 0)) + 2
        raise NonMonotoneTime(f"{path}: time does not increase at row {bad + 1}")
    period = float(gaps[0])
    off = np.abs(gaps - period)
    if np.any(off > 0.01 * period):
        bad = int(np.argmax(off > 0.01 * period)) + 2
        raise IrregularPeriod(
            f"{path}: gap before row {bad + 1} deviates more than 1% from period {period}"
        )
    return WeatherSeries(period, np.array(rows), source_tag=str(path))


def resample(series: WeatherSeries, new_period_s: float) -> WeatherSeries:
    """Decimate by block averaging to a coarser period; trailing partial bin dropped."""
    if new_period_s < series.period_s:
        raise IncompatiblePeriods("target period must be >= source period")
    factor = new_period_s / series.period_s
    if abs(factor - round(factor)) > 1e-9:
        raise IncompatiblePeriods("target period must be an integer multiple of the source")
    factor = int(round(factor))
    if factor == 1:
        return WeatherSeries(series.period_s, series.samples.copy(), series.source_tag)
    n_new = len(series) // factor
    if n_new == 0:
        raise IncompatiblePeriods("series shorter than one target-period bin")
    trimmed = series.samples[: n_new * factor]
    blocks = trimmed.reshape(n_new, factor, 4).mean(axis=1)
    return WeatherSeries(float(new_period_s), blocks, series.source_tag)
