"""Building, zone and weather configuration.

A building config is a single JSON document: either an explicit zone list or
a zone count expanded into randomized-but-seeded zone configs. Zone variants
reproduce the point-count spread seen on real BMSes (14-17 points per VAV):
no-reheat zones drop HC/RVC, a fraction of zones carry a second ZT sensor.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from ..errors import ConfigError

DEFAULT_DT_S = 30
DEFAULT_SAMPLING_S = 60


@dataclass
class WeatherConfig:
    """Sinusoidal diurnal outside-air temperature plus plant-side constants."""

    oat_mean: float = 75.0
    oat_amplitude: float = 5.0
    oat_peak_hour: float = 15.0
    supply_air_temp: float = 55.0
    supply_water_temp: float = 140.0
    gain_offset: float = 0.0  # extra load on top of zone gain schedules, °F/h

    def oat(self, t_s: float) -> float:
        h = (t_s / 3600.0) % 24.0
        return self.oat_mean + self.oat_amplitude * math.cos(2 * math.pi * (h - self.oat_peak_hour) / 24.0)


# The hot-day preset must keep every zone too warm for heating to engage even
# under full cooling: warm supply air + extra load floor ZT above the highest
# reachable Heating Setpoint (78°F setpoint -> HS = 76°F).
WEATHER_PRESETS = {
    "mild": WeatherConfig(),
    "hot_day": WeatherConfig(oat_mean=85.0, oat_amplitude=6.0, supply_air_temp=74.0, gain_offset=3.0),
}


@dataclass
class ZoneConfig:
    zone_id: str
    min_flow: float
    max_flow: float
    heating_max_flow: float
    thermal_coupling: float = 0.1   # a: envelope coupling to OAT, 1/h
    air_coupling: float = 0.5       # b: supply-air coupling at full flow, 1/h
    reheat_coupling: float = 0.15   # c: reheat coupling at full valve, 1/h
    internal_gain: tuple[float, ...] = field(default_factory=lambda: (0.2,) * 24)  # °F/h by hour
    noise_std: float = 0.02         # ZT noise per simulation step, °F
    has_reheat: bool = True
    ts_default: float = 72.0
    duct_factor: float = 0.95
    dc_chatter: bool = False
    dual_zt: bool = False

    def __post_init__(self):
        if not 0 <= self.min_flow < self.heating_max_flow <= self.max_flow:
            raise ConfigError(
                f"{self.zone_id}: need 0 <= min_flow < heating_max_flow <= max_flow, "
                f"got {self.min_flow}/{self.heating_max_flow}/{self.max_flow}"
            )
        if min(self.thermal_coupling, self.air_coupling, self.reheat_coupling) <= 0:
            raise ConfigError(f"{self.zone_id}: couplings must be positive")
        if len(self.internal_gain) != 24:
            raise ConfigError(f"{self.zone_id}: internal_gain must have 24 hourly entries")

    @property
    def point_count(self) -> int:
        n = 16
        if not self.has_reheat:
            n -= 2
        if self.dual_zt:
            n += 1
        return n


@dataclass
class BuildingConfig:
    zones: list[ZoneConfig]
    weather: WeatherConfig = field(default_factory=WeatherConfig)
    sampling_period_s: int = DEFAULT_SAMPLING_S
    dt_s: int = DEFAULT_DT_S
    seed: int = 0
    start_time: float = 0.0  # epoch seconds; 0 is a Monday 00:00
    temp_occ_rate_per_day: float = 0.02  # per-zone temporary-occupancy presses
    flow_noise_fraction: float = 0.02   # airflow sensor noise, fraction of max_flow

    def __post_init__(self):
        if self.dt_s <= 0 or self.sampling_period_s % self.dt_s != 0:
            raise ConfigError("dt_s must divide sampling_period_s")
        if not self.zones:
            seen = set()
        else:
            seen = {z.zone_id for z in self.zones}
        if len(seen) != len(self.zones):
            raise ConfigError("zone ids must be unique")


def _gain_schedule(rng: np.random.Generator) -> tuple[float, ...]:
    """Solar/occupant load by hour: small at night, peaking early afternoon.

    Sized so occupied zones see real cooling demand at midday (CC > 0 against
    minimum-flow ventilation) and a morning warm-up heating burst.
    """
    base = rng.uniform(0.2, 0.4)
    peak = rng.uniform(2.5, 4.5)
    return tuple(
        round(base + peak * max(0.0, math.sin(math.pi * (h - 7) / 12)) if 7 <= h <= 19 else base, 3)
        for h in range(24)
    )


def generate_zones(
    count: int,
    seed: int,
    *,
    dc_chatter_fraction: float = 0.2,
    no_reheat_fraction: float = 0.15,
    dual_zt_fraction: float = 0.1,
) -> list[ZoneConfig]:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(0xB11D,)))
    zones = []
    n_chatter = int(round(count * dc_chatter_fraction))
    n_noreheat = int(round(count * no_reheat_fraction))
    n_dualzt = int(round(count * dual_zt_fraction))
    chatter_ids = set(rng.choice(count, size=n_chatter, replace=False)) if n_chatter else set()
    noreheat_ids = set(rng.choice(count, size=n_noreheat, replace=False)) if n_noreheat else set()
    dual_ids = set(rng.choice(count, size=n_dualzt, replace=False)) if n_dualzt else set()
    for i in range(count):
        max_flow = float(rng.integers(40, 91) * 10)
        zones.append(ZoneConfig(
            zone_id=f"zone-{i:03d}",
            min_flow=round(0.3 * max_flow, 1),
            max_flow=max_flow,
            heating_max_flow=round(0.6 * max_flow, 1),
            thermal_coupling=round(rng.uniform(0.08, 0.13), 4),
            air_coupling=round(rng.uniform(0.40, 0.60), 4),
            reheat_coupling=round(rng.uniform(0.12, 0.18), 4),
            internal_gain=_gain_schedule(rng),
            noise_std=round(rng.uniform(0.006, 0.012), 4),
            has_reheat=i not in noreheat_ids,
            ts_default=float(rng.choice([71.0, 71.5, 72.0, 72.5, 73.0])),
            duct_factor=round(rng.uniform(0.92, 0.98), 4),
            dc_chatter=i in chatter_ids,
            dual_zt=i in dual_ids and i not in noreheat_ids,
        ))
    return zones


def building_config_from_dict(doc: dict) -> BuildingConfig:
    try:
        doc = dict(doc)
        seed = int(doc.pop("seed", 0))
        zones_field = doc.pop("zones", 8)
        if isinstance(zones_field, int):
            zones = generate_zones(
                zones_field,
                seed,
                dc_chatter_fraction=float(doc.pop("dc_chatter_fraction", 0.2)),
                no_reheat_fraction=float(doc.pop("no_reheat_fraction", 0.15)),
                dual_zt_fraction=float(doc.pop("dual_zt_fraction", 0.1)),
            )
        else:
            doc.pop("dc_chatter_fraction", None)
            doc.pop("no_reheat_fraction", None)
            doc.pop("dual_zt_fraction", None)
            zones = [z if isinstance(z, ZoneConfig) else ZoneConfig(**z) for z in zones_field]
        weather_field = doc.pop("weather", "mild")
        if isinstance(weather_field, str):
            if weather_field not in WEATHER_PRESETS:
                raise ConfigError(f"unknown weather preset {weather_field!r}")
            weather = WEATHER_PRESETS[weather_field]
        elif isinstance(weather_field, WeatherConfig):
            weather = weather_field
        else:
            weather = WeatherConfig(**weather_field)
        return BuildingConfig(zones=zones, weather=weather, seed=seed, **doc)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"bad building config: {exc}") from exc


def load_building_config(path: str | Path) -> BuildingConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top-level config must be a JSON object")
    return building_config_from_dict(doc)


def dump_building_config(config: BuildingConfig) -> dict:
    doc = asdict(config)
    doc["zones"] = [asdict(z) for z in config.zones]
    return doc
