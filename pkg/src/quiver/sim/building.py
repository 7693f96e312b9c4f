"""Discrete-time multi-zone VAV building simulator.

Controller chain per zone, mirroring how the BMS points relate: Temperature
Setpoint and Occupied Command (plus thermostat inputs) set the guardband
[HS, CS]; Zone Temperature against the guardband drives proportional Cooling
and Heating Commands (K_p = 2°F spans 0-100%); CC sets the Supply Air Flow
Setpoint between the zone's design minimum and maximum; during heating the
airflow drops to the floor and only ramps toward heating_max_flow after HC
has been pinned at 100% for 15 minutes; the Reheat Valve Command tracks HC
through a 5-minute first-order lag; the Damper Command is the differential
correction 100*(SAFS - SAF)/max_flow, consumed as the damper actuates and
self-resetting toward zero.

Thermal model (first order, rates in °F/h):

    dZT/dt = a*(OAT - ZT) + b*(SAF/max_flow)*(SAT - ZT)
           + c*(RVC/100)*(SWT - ZT) + gain(hour) + noise

Experiment writes land in BACnet-style priority arrays; an occupied slot on
an actuator supersedes the computed value and propagates downstream. The
embedded controller's own safeties are enforced both at write time (SAFS
clamped to [min, max]; heating writes > 0 rejected while ZT > HS; cooling
writes > 0 rejected while ZT < HS) and continuously on effective commands,
with suppressions recorded so dependency-mapping errors can be attributed to
ZT lockouts.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ControllerRejected, EmptyRange, NotWritable
from ..points import (
    ACTUATOR_TYPES,
    OccupancyMode,
    Point,
    PointType,
    PriorityArray,
)
from .config import BuildingConfig

KP_F = 2.0
BAND_WIDTH_F = {
    OccupancyMode.OCCUPIED: 4.0,
    OccupancyMode.STANDBY: 8.0,
    OccupancyMode.UNOCCUPIED: 12.0,
}
RVC_TAU_S = 300.0
RAMP_ENGAGE_PCT = 99.99
RAMP_HOLD_S = 900.0
RAMP_RISE_S = 1800.0
DAMPER_GAIN = 0.5          # fraction of the pending DC consumed per step
DC_PULSE_FLOOR = 0.5       # pending one-shot DC below this snaps to zero
TEMP_OCC_HOLD_S = 7200.0
AHU_REQUEST_PCT = 95.0
OCCUPIED_START_H = 8
OCCUPIED_END_H = 18

_TYPE_ORDER = list(PointType)
_TYPE_INDEX = {t: i for i, t in enumerate(_TYPE_ORDER)}
_OVERRIDE_TYPES = (PointType.TS, PointType.OC, PointType.CC, PointType.HC,
                   PointType.RVC, PointType.SAFS)


def compute_guardband(ts: float, mode: OccupancyMode, adjust: float = 0.0) -> tuple[float, float]:
    """(HS, CS) for a setpoint, occupancy mode and thermostat adjust.

    Band width is 4/8/12°F for Occupied/Standby/Unoccupied, split
    symmetrically around TS + adjust; adjust is clamped to ±1°F.
    """
    adjust = min(1.0, max(-1.0, adjust))
    w = BAND_WIDTH_F[OccupancyMode(mode)]
    center = ts + adjust
    return center - w / 2.0, center + w / 2.0


@dataclass(frozen=True)
class LockoutEvent:
    t: float
    zone_id: str
    kind: str  # heating_lockout | cooling_lockout | heating_write_rejected | cooling_write_rejected


@dataclass
class GroundTruth:
    """The simulator's wiring, for evaluating the inference pipelines."""

    point_zone: dict[str, str]
    point_type: dict[str, str]
    zone_edges: dict[str, list[tuple[str, str]]]
    zone_nodes: dict[str, list[str]]

    def to_json(self) -> dict:
        return {
            "point_zone": self.point_zone,
            "point_type": self.point_type,
            "zone_edges": {z: [[u, v] for u, v in e] for z, e in self.zone_edges.items()},
            "zone_nodes": self.zone_nodes,
        }


_REHEAT_EDGES = [
    (PointType.TS, PointType.CC), (PointType.TS, PointType.HC),
    (PointType.OC, PointType.CC), (PointType.OC, PointType.HC),
    (PointType.CC, PointType.SAFS), (PointType.HC, PointType.RVC),
    (PointType.HC, PointType.SAFS), (PointType.SAFS, PointType.DC),
]
_NO_REHEAT_EDGES = [
    (PointType.TS, PointType.CC), (PointType.OC, PointType.CC),
    (PointType.CC, PointType.SAFS), (PointType.SAFS, PointType.DC),
]


class Building:
    """Vectorized multi-zone simulation with per-point trend recording."""

    def __init__(self, config: BuildingConfig):
        self.config = config
        self.weather = config.weather
        zones = config.zones
        n = len(zones)
        self.n_zones = n
        self.zone_ids = [z.zone_id for z in zones]
        self._zone_index = {z.zone_id: i for i, z in enumerate(zones)}

        seq = np.random.SeedSequence(entropy=config.seed, spawn_key=(0x51A1,))
        s_noise, s_layout, s_chatter = seq.spawn(3)
        self._rng = np.random.default_rng(s_noise)

        as_f = lambda f: np.array([f(z) for z in zones], dtype=float)
        self._min_flow = as_f(lambda z: z.min_flow)
        self._max_flow = as_f(lambda z: z.max_flow)
        self._heat_max = as_f(lambda z: z.heating_max_flow)
        self._a = as_f(lambda z: z.thermal_coupling)
        self._b = as_f(lambda z: z.air_coupling)
        self._c = as_f(lambda z: z.reheat_coupling)
        self._noise_std = as_f(lambda z: z.noise_std)
        self._duct = as_f(lambda z: z.duct_factor)
        self._ts_default = as_f(lambda z: z.ts_default)
        self._has_reheat = np.array([z.has_reheat for z in zones], dtype=bool)
        self._gain = np.array([z.internal_gain for z in zones], dtype=float).reshape(n, 24)

        chat_rng = np.random.default_rng(s_chatter)
        chatter = np.array([z.dc_chatter for z in zones])
        self._chatter_amp = np.where(chatter, chat_rng.uniform(0.04, 0.09, n), 0.0)
        self._chatter_period = chat_rng.uniform(2400.0, 5400.0, n)
        self._chatter_phase = chat_rng.uniform(0.0, 2 * math.pi, n)
        self._flow_noise_mult = np.where(chatter, 2.0, 1.0)

        # dynamic state
        self.clock = float(config.start_time)
        self._start = float(config.start_time)
        self._steps = 0
        self._sample_every = config.sampling_period_s // config.dt_s
        self.zt = self._ts_default + self._rng.uniform(-1.0, 1.0, n)
        self.dp = np.full(n, 30.0)
        self.saf = self._max_flow * (self.dp / 100.0) * self._duct
        self.rvc = np.zeros(n)
        self._ramp_s = np.zeros(n)
        self._tovr_expiry = np.full(n, -np.inf)
        self._adjust = np.zeros(n)
        self._dc_pulse = np.zeros(n)
        self.dc_cmd = np.zeros(n)
        self.ahu_cooling_request = False
        self.hx_heating_request = False
        self.lockout_events: list[LockoutEvent] = []
        self._prev_supp_heat = np.zeros(n, dtype=bool)
        self._prev_supp_cool = np.zeros(n, dtype=bool)

        # effective values refreshed by each controller step
        self.mode = np.full(n, int(OccupancyMode.UNOCCUPIED), dtype=np.int64)
        self.ts_eff = self._ts_default.copy()
        self.hs = self.ts_eff - 6.0
        self.cs = self.ts_eff + 6.0
        self.cc_eff = np.zeros(n)
        self.hc_eff = np.zeros(n)
        self.rvc_eff = np.zeros(n)
        self.safs_eff = self._min_flow.copy()

        # priority-array override caches (mask + effective value per type)
        self._ovr_mask = {t: np.zeros(n, dtype=bool) for t in _OVERRIDE_TYPES}
        self._ovr_val = {t: np.zeros(n) for t in _OVERRIDE_TYPES}

        self._build_points(np.random.default_rng(s_layout))
        self._init_trends()
        self._state_cache: np.ndarray | None = None
        self.step(0)  # resolve effective values at t0 without advancing

    # ------------------------------------------------------------------
    # layout

    def _build_points(self, rng: np.random.Generator) -> None:
        entries: list[tuple[PointType, int, float]] = []  # (type, zone idx, sensor bias)
        for zi, zone in enumerate(self.config.zones):
            for ptype in _TYPE_ORDER:
                if ptype in (PointType.HC, PointType.RVC) and not zone.has_reheat:
                    continue
                entries.append((ptype, zi, 0.0))
            if zone.dual_zt:
                entries.append((PointType.ZT, zi, round(float(rng.uniform(-0.5, 0.5)), 3)))
        labels = [f"pt-{i:05d}" for i in range(len(entries))]
        rng.shuffle(labels)

        self.points: dict[str, Point] = {}
        self._pid_col: dict[str, int] = {}
        self._zone_points: dict[str, list[str]] = {z: [] for z in self.zone_ids}
        type_idx = np.empty(len(entries), dtype=np.int64)
        zone_idx = np.empty(len(entries), dtype=np.int64)
        bias = np.zeros(len(entries))
        for col, ((ptype, zi, b), pid) in enumerate(zip(entries, labels)):
            zone_id = self.zone_ids[zi]
            self.points[pid] = Point(id=pid, zone_id=zone_id, ptype=ptype,
                                     priority=PriorityArray(relinquish_default=0.0))
            self._pid_col[pid] = col
            self._zone_points[zone_id].append(pid)
            type_idx[col] = _TYPE_INDEX[ptype]
            zone_idx[col] = zi
            bias[col] = b
        self._col_type_idx = type_idx
        self._col_zone_idx = zone_idx
        self._col_bias = bias
        self.n_points = len(entries)

    def _init_trends(self) -> None:
        self._cap = 4096
        self._trend_t = np.empty(self._cap)
        self._trend_v = np.empty((self._cap, self.n_points))
        self._n_samples = 0

    # ------------------------------------------------------------------
    # write path

    def zone_config(self, zone_id: str):
        return self.config.zones[self._zone_index[zone_id]]

    def zone_points(self, zone_id: str) -> list[Point]:
        return [self.points[p] for p in self._zone_points[zone_id]]

    def standard_zones(self) -> list[str]:
        """Zones with the full 16-point complement (reheat, single ZT sensor)."""
        return [z.zone_id for z in self.config.zones if z.has_reheat and not z.dual_zt]

    def zone_point(self, zone_id: str, ptype: PointType) -> Point:
        for pid in self._zone_points[zone_id]:
            p = self.points[pid]
            if p.ptype is ptype:
                return p
        raise KeyError(f"{zone_id} has no {ptype.value} point")

    def _admit(self, point: Point, value: float) -> float:
        """Embedded-controller safeties; returns the accepted (possibly clamped) value."""
        zi = self._zone_index[point.zone_id]
        t = point.ptype
        if t is PointType.SAFS:
            return float(np.clip(value, self._min_flow[zi], self._max_flow[zi]))
        if t in (PointType.HC, PointType.RVC):
            if value > 0 and self.zt[zi] > self.hs[zi]:
                self.lockout_events.append(LockoutEvent(self.clock, point.zone_id, "heating_write_rejected"))
                raise ControllerRejected(
                    f"heating disallowed: ZT {self.zt[zi]:.2f} above HS {self.hs[zi]:.2f}")
            return float(np.clip(value, 0.0, 100.0))
        if t is PointType.CC:
            if value > 0 and self.zt[zi] < self.hs[zi]:
                self.lockout_events.append(LockoutEvent(self.clock, point.zone_id, "cooling_write_rejected"))
                raise ControllerRejected(
                    f"cooling disallowed: ZT {self.zt[zi]:.2f} below HS {self.hs[zi]:.2f}")
            return float(np.clip(value, 0.0, 100.0))
        if t is PointType.DC:
            return float(np.clip(value, -100.0, 100.0))
        if t is PointType.OC:
            mode = int(round(value))
            if mode not in (1, 2, 3) or abs(value - mode) > 1e-6:
                raise ControllerRejected(f"invalid occupancy mode {value!r}")
            return float(mode)
        return float(value)

    def apply_write(self, point_id: str, level: int, value: float) -> float:
        """Apply a priority write through the controller; returns the new effective value."""
        point = self.points[point_id]
        if not point.writable:
            raise NotWritable(f"{point_id} ({point.ptype.value}) is read-only")
        accepted = self._admit(point, value)
        point.write_slot(level, accepted)
        zi = self._zone_index[point.zone_id]
        if point.ptype is PointType.DC:
            # One-shot delta: actuates the damper over the next steps, then decays.
            self._dc_pulse[zi] = accepted
            self.dc_cmd[zi] = accepted
        else:
            self._ovr_mask[point.ptype][zi] = True
            self._ovr_val[point.ptype][zi] = point.priority.effective()
        return self.effective_value(point_id)

    def apply_relinquish(self, point_id: str, level: int) -> float:
        point = self.points[point_id]
        if not point.writable:
            raise NotWritable(f"{point_id} ({point.ptype.value}) is read-only")
        point.relinquish_slot(level)
        zi = self._zone_index[point.zone_id]
        if point.ptype is PointType.DC:
            if not point.priority.occupied_levels():
                self._dc_pulse[zi] = 0.0
        else:
            if point.priority.occupied_levels():
                self._ovr_val[point.ptype][zi] = point.priority.effective()
            else:
                self._ovr_mask[point.ptype][zi] = False
                self._ovr_val[point.ptype][zi] = 0.0
        return self.effective_value(point_id)

    def effective_value(self, point_id: str) -> float:
        """Present value: priority override if any slot is occupied, else live state."""
        point = self.points[point_id]
        zi = self._zone_index[point.zone_id]
        if point.ptype is PointType.DC:
            return float(self.dc_cmd[zi])
        if point.writable and point.priority.occupied_levels():
            return point.priority.effective()
        return float(self._state_matrix()[_TYPE_INDEX[point.ptype], zi]
                     + self._col_bias[self._pid_col[point_id]])

    def occupied_experiment_slots(self, level: int) -> list[str]:
        return [pid for pid, p in self.points.items()
                if p.writable and p.priority.slot(level) is not None]

    def press_temporary_occupancy(self, zone_id: str) -> None:
        self._tovr_expiry[self._zone_index[zone_id]] = self.clock + TEMP_OCC_HOLD_S

    # ------------------------------------------------------------------
    # simulation

    def _state_matrix(self) -> np.ndarray:
        if self._state_cache is not None:
            return self._state_cache
        self._state_cache = np.stack([
            self.ts_eff,
            self.mode.astype(float),
            self._adjust,
            (self.clock < self._tovr_expiry).astype(float),
            self.cs,
            self.hs,
            self.zt,
            self._min_flow,
            self._max_flow,
            self.cc_eff,
            self.hc_eff,
            self.rvc_eff,
            self.safs_eff,
            self.saf,
            self.dc_cmd,
            self.dp,
        ])
        return self._state_cache

    def step(self, dt: float | None = None) -> None:
        """Advance one step: resolve effective values -> controller -> physics."""
        if dt is None:
            dt = float(self.config.dt_s)
        self._state_cache = None
        t = self.clock
        n = self.n_zones
        hour = (t / 3600.0) % 24.0
        h_idx = int(hour)
        weekday = int(t // 86400.0) % 7 < 5
        sched_occ = weekday and OCCUPIED_START_H <= hour < OCCUPIED_END_H

        if dt > 0:
            u = self._rng.random((3, n))
            g = self._rng.standard_normal((2, n))
            # temporary-occupancy presses only bite outside scheduled occupancy
            press_p = self.config.temp_occ_rate_per_day * dt / 86400.0
            if not sched_occ:
                pressed = u[0] < press_p
                self._tovr_expiry = np.where(pressed, t + TEMP_OCC_HOLD_S, self._tovr_expiry)
            if sched_occ:
                nudged = u[1] < dt / (4 * 3600.0)
                new_adj = np.round(u[2] * 4.0) / 2.0 - 1.0
                self._adjust = np.where(nudged, new_adj, self._adjust)

        # --- effective inputs
        tovr = t < self._tovr_expiry
        base_mode = np.where(sched_occ | tovr, int(OccupancyMode.OCCUPIED), int(OccupancyMode.UNOCCUPIED))
        mode = np.where(self._ovr_mask[PointType.OC], self._ovr_val[PointType.OC], base_mode).astype(np.int64)
        ts_eff = np.where(self._ovr_mask[PointType.TS], self._ovr_val[PointType.TS], self._ts_default)
        adjust = np.clip(self._adjust, -1.0, 1.0)
        width = np.array([0.0, 4.0, 8.0, 12.0])[mode]
        center = ts_eff + adjust
        hs = center - width / 2.0
        cs = center + width / 2.0

        # --- commands
        cc_calc = np.clip((self.zt - cs) * (100.0 / KP_F), 0.0, 100.0)
        hc_calc = np.clip((hs - self.zt) * (100.0 / KP_F), 0.0, 100.0) * self._has_reheat
        cc_eff = np.where(self._ovr_mask[PointType.CC], self._ovr_val[PointType.CC], cc_calc)
        hc_eff = np.where(self._ovr_mask[PointType.HC], self._ovr_val[PointType.HC], hc_calc)
        hc_eff = hc_eff * self._has_reheat

        heat_locked = self.zt > hs
        cool_locked = self.zt < hs
        supp_heat = self._ovr_mask[PointType.HC] & (self._ovr_val[PointType.HC] > 0) & heat_locked
        supp_cool = self._ovr_mask[PointType.CC] & (self._ovr_val[PointType.CC] > 0) & cool_locked
        for zi in np.nonzero(supp_heat & ~self._prev_supp_heat)[0]:
            self.lockout_events.append(LockoutEvent(t, self.zone_ids[zi], "heating_lockout"))
        for zi in np.nonzero(supp_cool & ~self._prev_supp_cool)[0]:
            self.lockout_events.append(LockoutEvent(t, self.zone_ids[zi], "cooling_lockout"))
        self._prev_supp_heat = supp_heat
        self._prev_supp_cool = supp_cool
        hc_eff = np.where(heat_locked, 0.0, hc_eff)
        cc_eff = np.where(cool_locked, 0.0, cc_eff)
        cc_eff = np.where(hc_eff > 0, 0.0, cc_eff)  # heating precedence at ZT == HS

        # --- airflow setpoint
        heating = hc_eff > 0
        self._ramp_s = np.where(hc_eff >= RAMP_ENGAGE_PCT, self._ramp_s + dt, 0.0)
        ramp = np.clip((self._ramp_s - RAMP_HOLD_S) / RAMP_RISE_S, 0.0, 1.0)
        min_eff = np.where(mode == int(OccupancyMode.OCCUPIED), self._min_flow, 0.0)
        safs_calc = np.where(
            heating,
            min_eff + ramp * (self._heat_max - min_eff),
            min_eff + (cc_eff / 100.0) * (self._max_flow - min_eff),
        )
        safs_eff = np.where(self._ovr_mask[PointType.SAFS], self._ovr_val[PointType.SAFS], safs_calc)

        # --- reheat valve (first-order lag toward effective HC)
        if dt > 0:
            alpha = 1.0 - math.exp(-dt / RVC_TAU_S)
            self.rvc = self.rvc + alpha * (hc_eff - self.rvc)
        self.rvc = np.where(self._ovr_mask[PointType.RVC], self._ovr_val[PointType.RVC], self.rvc)
        rvc_eff = self.rvc * self._has_reheat

        # --- damper
        track = np.clip((safs_eff - self.saf) * (100.0 / self._max_flow), -100.0, 100.0)
        pulse_active = self._dc_pulse != 0.0
        dc_cmd = np.where(pulse_active, self._dc_pulse, track)
        if dt > 0:
            self.dp = np.clip(self.dp + DAMPER_GAIN * dc_cmd, 0.0, 100.0)
            self._dc_pulse = self._dc_pulse * (1.0 - DAMPER_GAIN)
            self._dc_pulse[np.abs(self._dc_pulse) < DC_PULSE_FLOOR] = 0.0

            disturb = self._chatter_amp * np.sin(2 * math.pi * t / self._chatter_period + self._chatter_phase)
            noise = self.config.flow_noise_fraction * self._max_flow * self._flow_noise_mult * g[0]
            self.saf = np.clip(self._max_flow * (self.dp / 100.0) * self._duct * (1.0 + disturb) + noise, 0.0, None)

            # --- thermal balance
            oat = self.weather.oat(t)
            gain = self._gain[:, h_idx] + self.weather.gain_offset
            dzt = (
                self._a * (oat - self.zt)
                + self._b * (self.saf / self._max_flow) * (self.weather.supply_air_temp - self.zt)
                + self._c * (rvc_eff / 100.0) * (self.weather.supply_water_temp - self.zt)
                + gain
            )
            self.zt = np.clip(self.zt + dzt * (dt / 3600.0) + self._noise_std * g[1], 40.0, 110.0)

        self.mode = mode
        self.ts_eff = ts_eff
        self.hs = hs
        self.cs = cs
        self.cc_eff = cc_eff
        self.hc_eff = hc_eff
        self.rvc_eff = rvc_eff
        self.safs_eff = safs_eff
        self.dc_cmd = dc_cmd
        self.ahu_cooling_request = bool(np.any(cc_eff >= AHU_REQUEST_PCT))
        self.hx_heating_request = bool(np.any(hc_eff >= AHU_REQUEST_PCT))

        self._state_cache = None
        if dt > 0:
            self.clock += dt
            self._steps += 1
            if self._steps % self._sample_every == 0:
                self._record()

    def _record(self) -> None:
        if self._n_samples == self._cap:
            self._cap *= 2
            new_t = np.empty(self._cap)
            new_v = np.empty((self._cap, self.n_points))
            new_t[: self._n_samples] = self._trend_t[: self._n_samples]
            new_v[: self._n_samples] = self._trend_v[: self._n_samples]
            self._trend_t, self._trend_v = new_t, new_v
        state = self._state_matrix()
        self._trend_t[self._n_samples] = self.clock
        self._trend_v[self._n_samples] = state[self._col_type_idx, self._col_zone_idx] + self._col_bias
        self._n_samples += 1

    def run_hours(self, hours: float) -> None:
        steps = int(round(hours * 3600.0 / self.config.dt_s))
        for _ in range(steps):
            self.step()

    def run_until(self, t_end: float) -> None:
        while self.clock < t_end - 1e-9:
            self.step()

    # ------------------------------------------------------------------
    # trend access

    def sample_count(self) -> int:
        return self._n_samples

    def window(self, point_id: str, t0: float, t1: float) -> tuple[np.ndarray, np.ndarray]:
        """Recorded samples of one point with t0 <= t < t1."""
        if t0 >= t1:
            raise EmptyRange(f"empty query range [{t0}, {t1})")
        col = self._pid_col[point_id]
        times = self._trend_t[: self._n_samples]
        lo = int(np.searchsorted(times, t0))
        hi = int(np.searchsorted(times, t1, side="left"))
        return times[lo:hi].copy(), self._trend_v[lo:hi, col].copy()

    def window_matrix(self, point_ids: list[str], t0: float, t1: float) -> tuple[np.ndarray, np.ndarray]:
        """(times, values) with one row per requested point over [t0, t1)."""
        if t0 >= t1:
            raise EmptyRange(f"empty query range [{t0}, {t1})")
        times = self._trend_t[: self._n_samples]
        lo = int(np.searchsorted(times, t0))
        hi = int(np.searchsorted(times, t1, side="left"))
        cols = [self._pid_col[p] for p in point_ids]
        return times[lo:hi].copy(), self._trend_v[lo:hi][:, cols].T.copy()

    def full_trend(self, point_id: str) -> tuple[np.ndarray, np.ndarray]:
        col = self._pid_col[point_id]
        return (self._trend_t[: self._n_samples].copy(),
                self._trend_v[: self._n_samples, col].copy())

    def trend_digest(self) -> str:
        h = hashlib.sha256()
        h.update(self._trend_t[: self._n_samples].tobytes())
        h.update(self._trend_v[: self._n_samples].tobytes())
        return h.hexdigest()

    # ------------------------------------------------------------------
    # ground truth

    def ground_truth(self) -> GroundTruth:
        point_zone = {pid: p.zone_id for pid, p in self.points.items()}
        point_type = {pid: p.ptype.value for pid, p in self.points.items()}
        zone_edges: dict[str, list[tuple[str, str]]] = {}
        zone_nodes: dict[str, list[str]] = {}
        for zone in self.config.zones:
            edges = _REHEAT_EDGES if zone.has_reheat else _NO_REHEAT_EDGES
            zone_edges[zone.zone_id] = [(u.value, v.value) for u, v in edges]
            nodes = [t for t in ACTUATOR_TYPES
                     if zone.has_reheat or t not in (PointType.HC, PointType.RVC)]
            zone_nodes[zone.zone_id] = [t.value for t in nodes]
        return GroundTruth(point_zone, point_type, zone_edges, zone_nodes)
