"""BMS point model: semantic types, BACnet-style priority arrays, trend storage.

A *point* is any sensor, actuator or configuration datum a VAV zone reports.
Writable points carry a 16-slot priority array; the effective value is the
value of the lowest-numbered occupied slot, falling back to the relinquish
default when all slots are empty. Relinquishing is an explicit null write,
never a numeric 0 (0% is a legal command value).
"""
from __future__ import annotations

import csv
from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path

import numpy as np

from .errors import EmptyRange, InvalidLevel, NonMonotonicTimestamp, NotWritable

N_PRIORITY_LEVELS = 16


class OccupancyMode(IntEnum):
    OCCUPIED = 1
    STANDBY = 2
    UNOCCUPIED = 3


class PointType(str, Enum):
    """The 16 VAV point types reported to the BMS.

    Member names use the conventional short codes where they exist; the value
    is the canonical symbol other modules resolve (``PointType("SAFS")``).
    """

    TS = "TS"                                   # Temperature Setpoint
    OC = "OC"                                   # Occupied Command
    THERMOSTAT_ADJUST = "ThermostatAdjust"
    TEMPORARY_OCCUPANCY = "TemporaryOccupancy"
    CS = "CS"                                   # Cooling Setpoint
    HS = "HS"                                   # Heating Setpoint
    ZT = "ZT"                                   # Zone Temperature
    MIN_SUPPLY_FLOW = "MinSupplyFlow"
    MAX_SUPPLY_FLOW = "MaxSupplyFlow"
    CC = "CC"                                   # Cooling Command
    HC = "HC"                                   # Heating Command
    RVC = "RVC"                                 # Reheat Valve Command
    SAFS = "SAFS"                               # Supply Air Flow Setpoint
    SAF = "SAF"                                 # Supply Air Flow
    DC = "DC"                                   # Damper Command
    DP = "DP"                                   # Damper Position

    @property
    def unit(self) -> str:
        return _UNITS[self]

    @property
    def writable(self) -> bool:
        return self in WRITABLE_TYPES


_UNITS = {
    PointType.TS: "°F",
    PointType.OC: "mode",
    PointType.THERMOSTAT_ADJUST: "°F",
    PointType.TEMPORARY_OCCUPANCY: "dimensionless",
    PointType.CS: "°F",
    PointType.HS: "°F",
    PointType.ZT: "°F",
    PointType.MIN_SUPPLY_FLOW: "CFM",
    PointType.MAX_SUPPLY_FLOW: "CFM",
    PointType.CC: "%-command",
    PointType.HC: "%-command",
    PointType.RVC: "%-command",
    PointType.SAFS: "CFM",
    PointType.SAF: "CFM",
    PointType.DC: "%-command",
    PointType.DP: "%-open",
}

# Sensors, computed setpoints, config constants and thermostat hardware inputs
# are read-only; only true control inputs accept priority writes.
WRITABLE_TYPES = frozenset({
    PointType.TS,
    PointType.OC,
    PointType.CC,
    PointType.HC,
    PointType.RVC,
    PointType.SAFS,
    PointType.DC,
})

# Actuator node set used by the dependency-mapping pipeline.
ACTUATOR_TYPES = (
    PointType.TS,
    PointType.OC,
    PointType.CC,
    PointType.HC,
    PointType.RVC,
    PointType.SAFS,
    PointType.DC,
)


def _check_level(level: int) -> None:
    if not isinstance(level, int) or not 1 <= level <= N_PRIORITY_LEVELS:
        raise InvalidLevel(f"priority level must be in 1..{N_PRIORITY_LEVELS}, got {level!r}")


@dataclass
class PriorityArray:
    """16 ordered slots; slot 1 has the highest precedence."""

    relinquish_default: float = 0.0
    slots: list[float | None] = field(default_factory=lambda: [None] * N_PRIORITY_LEVELS)

    def write(self, level: int, value: float) -> float:
        _check_level(level)
        self.slots[level - 1] = float(value)
        return self.effective()

    def relinquish(self, level: int) -> float:
        _check_level(level)
        self.slots[level - 1] = None
        return self.effective()

    def effective(self) -> float:
        for v in self.slots:
            if v is not None:
                return v
        return self.relinquish_default

    def slot(self, level: int) -> float | None:
        _check_level(level)
        return self.slots[level - 1]

    def occupied_levels(self) -> list[int]:
        return [i + 1 for i, v in enumerate(self.slots) if v is not None]


class TimeSeries:
    """Strictly-increasing (timestamp, value) samples with half-open queries."""

    __slots__ = ("_t", "_v")

    def __init__(self, times=(), values=()):
        self._t: list[float] = [float(t) for t in times]
        self._v: list[float] = [float(v) for v in values]
        for a, b in zip(self._t, self._t[1:]):
            if b <= a:
                raise NonMonotonicTimestamp(f"timestamps not strictly increasing: {a} -> {b}")

    def __len__(self) -> int:
        return len(self._t)

    def record(self, t: float, v: float) -> None:
        if self._t and t <= self._t[-1]:
            raise NonMonotonicTimestamp(f"t={t} not after last sample t={self._t[-1]}")
        self._t.append(float(t))
        self._v.append(float(v))

    def window(self, t0: float, t1: float) -> tuple[np.ndarray, np.ndarray]:
        """Samples with t0 <= t < t1, order preserved."""
        if t0 >= t1:
            raise EmptyRange(f"empty query range [{t0}, {t1})")
        lo = bisect_left(self._t, t0)
        hi = bisect_left(self._t, t1)
        return np.asarray(self._t[lo:hi]), np.asarray(self._v[lo:hi])

    def last(self) -> tuple[float, float] | None:
        if not self._t:
            return None
        return self._t[-1], self._v[-1]

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self._t), np.asarray(self._v)


@dataclass
class Point:
    """One named BMS datum with its write arbitration and trend history."""

    id: str
    zone_id: str
    ptype: PointType
    priority: PriorityArray = field(default_factory=PriorityArray)
    trend: TimeSeries = field(default_factory=TimeSeries)
    writable: bool | None = None

    def __post_init__(self):
        if self.writable is None:
            self.writable = self.ptype.writable

    def effective(self) -> float:
        return self.priority.effective()

    def write_slot(self, level: int, value: float) -> float:
        if not self.writable:
            raise NotWritable(f"{self.id} ({self.ptype.value}) is read-only")
        return self.priority.write(level, value)

    def relinquish_slot(self, level: int) -> float:
        if not self.writable:
            raise NotWritable(f"{self.id} ({self.ptype.value}) is read-only")
        return self.priority.relinquish(level)

    def record_sample(self, t: float, v: float) -> None:
        self.trend.record(t, v)

    def query_window(self, t0: float, t1: float) -> tuple[np.ndarray, np.ndarray]:
        return self.trend.window(t0, t1)


def write_trend_csv(path: str | Path, times, values) -> None:
    """One CSV per point: columns timestamp_unix_s,value; LF endings."""
    path = Path(path)
    with path.open("w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["timestamp_unix_s", "value"])
        for t, v in zip(times, values):
            writer.writerow([repr(float(t)), repr(float(v))])


def read_trend_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    path = Path(path)
    times: list[float] = []
    values: list[float] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["timestamp_unix_s", "value"]:
            raise ValueError(f"{path}: unexpected trend header {header!r}")
        for row in reader:
            times.append(float(row[0]))
            values.append(float(row[1]))
    return np.asarray(times), np.asarray(values)
