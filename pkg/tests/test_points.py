import numpy as np
import pytest
from hypothesis import given, strategies as st

from quiver.errors import EmptyRange, InvalidLevel, NonMonotonicTimestamp, NotWritable
from quiver.points import (
    N_PRIORITY_LEVELS,
    Point,
    PointType,
    PriorityArray,
    TimeSeries,
    WRITABLE_TYPES,
    read_trend_csv,
    write_trend_csv,
)

SYMBOLS = [
    "TS", "OC", "HS", "CS", "ZT", "CC", "HC", "RVC", "SAFS", "SAF", "DC", "DP",
    "MinSupplyFlow", "MaxSupplyFlow", "ThermostatAdjust", "TemporaryOccupancy",
]


class TestPointType:
    def test_sixteen_members(self):
        assert len(PointType) == 16

    def test_every_symbol_resolves(self):
        members = {PointType(s) for s in SYMBOLS}
        assert len(members) == 16

    def test_units(self):
        assert PointType.TS.unit == "°F"
        assert PointType.DP.unit == "%-open"
        assert PointType.CC.unit == "%-command"
        assert PointType.SAF.unit == "CFM"
        assert PointType.OC.unit == "mode"
        assert PointType.TEMPORARY_OCCUPANCY.unit == "dimensionless"

    def test_read_only_partition(self):
        for t in (PointType.ZT, PointType.SAF, PointType.DP,
                  PointType.MIN_SUPPLY_FLOW, PointType.MAX_SUPPLY_FLOW):
            assert not t.writable
        assert WRITABLE_TYPES == {PointType.TS, PointType.OC, PointType.CC, PointType.HC,
                                  PointType.RVC, PointType.SAFS, PointType.DC}


def make_point(ptype=PointType.TS, default=72.0):
    return Point(id="p1", zone_id="z1", ptype=ptype,
                 priority=PriorityArray(relinquish_default=default))


class TestPriorityWrites:
    def test_single_slot(self):
        p = make_point()
        assert p.write_slot(8, 75.0) == 75.0

    def test_lowest_numbered_slot_wins(self):
        p = make_point()
        p.write_slot(12, 70.0)
        assert p.write_slot(8, 75.0) == 75.0

    def test_sensor_rejects_write(self):
        p = make_point(ptype=PointType.ZT)
        with pytest.raises(NotWritable):
            p.write_slot(8, 75.0)

    def test_relinquish_to_default(self):
        p = make_point()
        p.write_slot(8, 75.0)
        assert p.relinquish_slot(8) == 72.0

    def test_relinquish_falls_to_next_slot(self):
        p = make_point()
        p.write_slot(8, 75.0)
        p.write_slot(12, 70.0)
        assert p.relinquish_slot(8) == 70.0

    def test_relinquish_empty_slot_noop(self):
        p = make_point()
        p.write_slot(8, 75.0)
        assert p.relinquish_slot(3) == 75.0

    def test_invalid_level(self):
        p = make_point()
        for level in (0, 17, -1):
            with pytest.raises(InvalidLevel):
                p.write_slot(level, 70.0)

    def test_write_then_relinquish_restores(self):
        p = make_point()
        p.write_slot(11, 68.0)
        before = p.effective()
        p.write_slot(5, 77.0)
        p.relinquish_slot(5)
        assert p.effective() == before


def scan_oracle(slots, default):
    for v in slots:
        if v is not None:
            return v
    return default


@given(st.lists(
    st.tuples(st.sampled_from(["write", "relinquish"]),
              st.integers(min_value=1, max_value=16),
              st.floats(min_value=0, max_value=100, allow_nan=False)),
    max_size=40,
))
def test_effective_matches_slot_scan_oracle(ops):
    arr = PriorityArray(relinquish_default=42.0)
    for op, level, value in ops:
        if op == "write":
            arr.write(level, value)
        else:
            arr.relinquish(level)
        assert arr.effective() == scan_oracle(arr.slots, 42.0)
    assert len(arr.slots) == N_PRIORITY_LEVELS


class TestTimeSeries:
    def test_record_and_length(self):
        ts = TimeSeries()
        ts.record(100, 72.0)
        assert len(ts) == 1

    def test_duplicate_timestamp_rejected(self):
        ts = TimeSeries()
        ts.record(100, 72.0)
        with pytest.raises(NonMonotonicTimestamp):
            ts.record(100, 72.5)

    def test_ordered_append(self):
        ts = TimeSeries()
        ts.record(100, 1.0)
        ts.record(160, 2.0)
        assert len(ts) == 2

    def test_half_open_window(self):
        ts = TimeSeries([100, 160, 220], [1, 2, 3])
        t, v = ts.window(100, 220)
        assert list(t) == [100, 160]

    def test_window_empty_trend(self):
        t, v = TimeSeries().window(0, 100)
        assert len(t) == 0

    def test_window_before_first_sample(self):
        ts = TimeSeries([100], [1])
        t, _ = ts.window(0, 100)
        assert len(t) == 0

    def test_empty_range_rejected(self):
        with pytest.raises(EmptyRange):
            TimeSeries().window(10, 10)


def test_trend_csv_roundtrip(tmp_path):
    path = tmp_path / "pt.csv"
    times = np.array([0.0, 60.0, 120.0])
    values = np.array([71.5, 72.0, 72.25])
    write_trend_csv(path, times, values)
    text = path.read_text()
    assert text.startswith("timestamp_unix_s,value\n")
    assert "\r" not in text
    t, v = read_trend_csv(path)
    np.testing.assert_array_equal(t, times)
    np.testing.assert_array_equal(v, values)
