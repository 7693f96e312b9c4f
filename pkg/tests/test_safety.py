import numpy as np
import pytest

from conftest import make_building
from quiver.errors import NotWritable, PointBusy, SessionNotActive, UnknownPoint
from quiver.points import PointType
from quiver.safety import Quiver, SafetyPolicy, SessionState

LEVEL = SafetyPolicy().experiment_priority_level


def ts_point(building, zone_idx=0):
    return building.zone_point(building.zone_ids[zone_idx], PointType.TS)


@pytest.fixture
def lab(tmp_path):
    building = make_building(n_zones=6, seed=21)
    quiver = Quiver(building, ledger_path=tmp_path / "ledger.jsonl")
    return building, quiver


class TestSessions:
    def test_begin_captures_reset_value(self, lab):
        building, quiver = lab
        pid = ts_point(building).id
        session = quiver.begin_session([pid])
        record = quiver.query_status(session, pid)
        assert record.reset_value == building.effective_value(pid)
        assert record.last_written_value is None

    def test_double_hold_rejected(self, lab):
        building, quiver = lab
        pid = ts_point(building).id
        quiver.begin_session([pid])
        with pytest.raises(PointBusy):
            quiver.begin_session([pid])

    def test_sensor_rejected(self, lab):
        building, quiver = lab
        zt = building.zone_point(building.zone_ids[0], PointType.ZT)
        with pytest.raises(NotWritable):
            quiver.begin_session([zt.id])

    def test_release_after_end(self, lab):
        building, quiver = lab
        pid = ts_point(building).id
        s1 = quiver.begin_session([pid])
        quiver.end_session(s1)
        s2 = quiver.begin_session([pid])
        assert s2.state is SessionState.ACTIVE


class TestSafeWrite:
    def test_out_of_range(self, lab):
        building, quiver = lab
        pid = ts_point(building).id
        session = quiver.begin_session([pid])
        res = quiver.safe_write(session, pid, 80.0, now=0.0)
        assert not res.accepted and res.reason == "out_of_range"

    def test_zone_rate_limit(self, lab):
        building, quiver = lab
        zone = building.zone_ids[0]
        ts = building.zone_point(zone, PointType.TS).id
        oc = building.zone_point(zone, PointType.OC).id
        session = quiver.begin_session([ts, oc])
        assert quiver.safe_write(session, ts, 75.0, now=0.0).accepted
        res = quiver.safe_write(session, oc, 1, now=300.0)
        assert not res.accepted and res.reason == "zone_rate_limited"
        # admission monotonicity: 600 s later the same write lands
        assert quiver.safe_write(session, oc, 1, now=600.0).accepted

    def test_global_rate_limit(self, lab):
        building, quiver = lab
        pids = [ts_point(building, i).id for i in range(3)]
        session = quiver.begin_session(pids)
        assert quiver.safe_write(session, pids[0], 75.0, now=0.0).accepted
        assert quiver.safe_write(session, pids[1], 75.0, now=10.0).accepted
        res = quiver.safe_write(session, pids[2], 75.0, now=15.0)
        assert not res.accepted and res.reason == "global_rate_limited"

    def test_clamped_write_accepted(self, lab):
        building, quiver = lab
        zone = building.zone_ids[0]
        safs = building.zone_point(zone, PointType.SAFS).id
        session = quiver.begin_session([safs])
        res = quiver.safe_write(session, safs, building.zone_config(zone).max_flow, now=0.0)
        assert res.accepted and res.effective == building.zone_config(zone).max_flow

    def test_lockout_write_not_taken(self, lab):
        building, quiver = lab
        zone = next(z for z in building.zone_ids if building.zone_config(z).has_reheat)
        building.zt[building.zone_ids.index(zone)] = 80.0
        building.step(0)
        hc = building.zone_point(zone, PointType.HC).id
        session = quiver.begin_session([hc])
        res = quiver.safe_write(session, hc, 50.0, now=0.0)
        assert not res.accepted and res.reason.startswith("write_not_taken")

    def test_write_after_end_raises(self, lab):
        building, quiver = lab
        pid = ts_point(building).id
        session = quiver.begin_session([pid])
        quiver.end_session(session)
        with pytest.raises(SessionNotActive):
            quiver.safe_write(session, pid, 70.0, now=0.0)

    def test_unknown_point(self, lab):
        building, quiver = lab
        session = quiver.begin_session([ts_point(building).id])
        with pytest.raises(UnknownPoint):
            quiver.query_status(session, "pt-99999")

    def test_status_after_write(self, lab):
        building, quiver = lab
        pid = ts_point(building).id
        session = quiver.begin_session([pid])
        quiver.safe_write(session, pid, 75.0, now=0.0)
        record = quiver.query_status(session, pid)
        assert record.last_written_value == 75.0
        assert record.last_write_timestamp == 0.0


class TestRollback:
    def test_rollback_empties_all_slots(self, lab):
        building, quiver = lab
        pids = [ts_point(building, i).id for i in range(3)]
        session = quiver.begin_session(pids)
        for i, pid in enumerate(pids):
            assert quiver.safe_write(session, pid, 75.0, now=i * 20.0).accepted
        quiver.rollback(session)
        assert building.occupied_experiment_slots(LEVEL) == []
        assert session.state is SessionState.ROLLED_BACK

    def test_rollback_restores_effective(self, lab):
        building, quiver = lab
        pid = ts_point(building).id
        before = building.effective_value(pid)
        session = quiver.begin_session([pid])
        quiver.safe_write(session, pid, 78.0, now=0.0)
        quiver.rollback(session)
        assert building.effective_value(pid) == before

    def test_rollback_idempotent(self, lab):
        building, quiver = lab
        session = quiver.begin_session([ts_point(building).id])
        quiver.rollback(session)
        quiver.rollback(session)
        assert session.state is SessionState.ROLLED_BACK

    def test_rollback_exempt_from_rate_limits(self, lab):
        building, quiver = lab
        pids = [ts_point(building, i).id for i in range(2)]
        session = quiver.begin_session(pids)
        quiver.safe_write(session, pids[0], 75.0, now=0.0)
        quiver.safe_write(session, pids[1], 75.0, now=10.0)
        quiver.rollback(session, now=10.5)  # immediately after a write
        assert building.occupied_experiment_slots(LEVEL) == []

    def test_end_with_no_writes(self, lab):
        building, quiver = lab
        session = quiver.begin_session([ts_point(building).id])
        quiver.end_session(session)
        assert session.state is SessionState.COMPLETED
        with pytest.raises(SessionNotActive):
            quiver.end_session(session)


class TestCrashRecovery:
    def test_replay_matches_clean_rollback(self, tmp_path):
        def run(crash: bool):
            building = make_building(n_zones=4, seed=33)
            path = tmp_path / ("crash.jsonl" if crash else "clean.jsonl")
            path.unlink(missing_ok=True)
            quiver = Quiver(building, ledger_path=path)
            pids = [building.zone_point(z, PointType.TS).id for z in building.zone_ids[:3]]
            session = quiver.begin_session(pids)
            for i, pid in enumerate(pids):
                quiver.safe_write(session, pid, 75.0, now=i * 30.0)
            if crash:
                del quiver, session  # process dies; only the file survives
                recovered = Quiver.recover(building, path)
                assert recovered.pending_from_ledger(path) == {}
            else:
                quiver.rollback(session)
            return [building.points[p].priority.slots[:] for p in pids]

        assert run(crash=True) == run(crash=False)

    def test_pending_parsing(self, tmp_path):
        building = make_building(n_zones=3, seed=34)
        path = tmp_path / "ledger.jsonl"
        quiver = Quiver(building, ledger_path=path)
        z0, z1 = building.zone_ids[:2]
        a = building.zone_point(z0, PointType.TS).id
        b = building.zone_point(z1, PointType.TS).id
        session = quiver.begin_session([a, b])
        quiver.safe_write(session, a, 75.0, now=0.0)
        quiver.safe_write(session, b, 75.0, now=10.0)
        quiver.relinquish(session, a, now=20.0)
        pending = Quiver.pending_from_ledger(path)
        assert pending == {session.session_id: [b]}


def test_rate_limit_soundness_random_schedules():
    # randomized schedules: accepted writes never violate either spacing rule
    rng = np.random.default_rng(99)
    building = make_building(n_zones=8, seed=44)
    quiver = Quiver(building)
    pids = [building.zone_point(z, PointType.TS).id for z in building.zone_ids]
    session = quiver.begin_session(pids)
    accepted: list[tuple[float, str]] = []
    t = 0.0
    for _ in range(400):
        t += float(rng.exponential(120.0))
        pid = pids[int(rng.integers(len(pids)))]
        res = quiver.safe_write(session, pid, float(rng.uniform(62, 78)), now=t)
        if res.accepted:
            accepted.append((t, building.points[pid].zone_id))
    times = np.array([a[0] for a in accepted])
    zones = [a[1] for a in accepted]
    assert np.all(np.diff(times) >= 10.0)
    for zone in set(zones):
        zt = times[[i for i, z in enumerate(zones) if z == zone]]
        assert np.all(np.diff(zt) >= 600.0)
