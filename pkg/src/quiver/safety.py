"""Safety-gated experiment writes: sessions, admission checks, rollback.

Every control experiment runs inside an ExperimentSession. A single guardian
serializes admission decisions for all sessions against one building and
enforces, in order: per-type value ranges, the conservative zone dependency
rule (one control input per VAV per 10 minutes — all points of a zone are
assumed related), and a 10-second global spacing so the BMS is never
hammered. Admitted writes go to the experiment priority slot and are
verified by readback; controller-clamped values count as accepted, controller
lockouts are retried twice and then surfaced as write_not_taken.

The guardian keeps a status ledger (reset value, last written value, last
write time, zone) per point and appends every transition to a JSON-lines
file, so a crashed experiment can be replayed and rolled back: relinquish and
rollback writes are exempt from rate limits — restoring safety must not wait.
Clamp writes (graph surgery) skip the zone budget but still respect the
global spacing.
"""
from __future__ import annotations

import itertools
import json
import math
import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import ControllerRejected, NotWritable, PointBusy, SessionNotActive, UnknownPoint
from .points import Point, PointType
from .sim.building import Building

_session_counter = itertools.count(1)


@dataclass
class SafetyPolicy:
    ts_range: tuple[float, float] = (62.0, 78.0)
    command_range: tuple[float, float] = (0.0, 100.0)
    oc_modes: tuple[int, ...] = (1, 2, 3)
    per_zone_min_interval_s: float = 600.0
    global_min_interval_s: float = 10.0
    verify_retries: int = 2
    experiment_priority_level: int = 10

    def admissible_range(self, point: Point, building: Building) -> tuple[float, float] | None:
        """Closed [lo, hi] for numeric points; None means set-valued (OC)."""
        t = point.ptype
        if t is PointType.TS:
            return self.ts_range
        if t is PointType.SAFS:
            return (0.0, building.zone_config(point.zone_id).max_flow)
        if t is PointType.OC:
            return None
        return self.command_range

    def value_admissible(self, point: Point, value: float, building: Building) -> bool:
        rng = self.admissible_range(point, building)
        if rng is None:
            return any(abs(value - m) < 1e-9 for m in self.oc_modes)
        return rng[0] <= value <= rng[1]


@dataclass
class WriteRecord:
    point_id: str
    zone_id: str
    reset_value: float
    in_experiment: bool = True
    last_written_value: float | None = None
    last_write_timestamp: float | None = None


class SessionState(str, Enum):
    ACTIVE = "Active"
    ROLLED_BACK = "RolledBack"
    COMPLETED = "Completed"


@dataclass
class ExperimentSession:
    session_id: str
    policy: SafetyPolicy
    ledger: dict[str, WriteRecord] = field(default_factory=dict)
    state: SessionState = SessionState.ACTIVE
    last_global_write_timestamp: float = -math.inf


@dataclass(frozen=True)
class WriteResult:
    accepted: bool
    point_id: str
    requested: float
    effective: float | None = None
    reason: str | None = None


class Quiver:
    """Admission guardian for one building; all writes funnel through here."""

    def __init__(self, building: Building, policy: SafetyPolicy | None = None,
                 ledger_path: str | Path | None = None):
        self.building = building
        self.policy = policy or SafetyPolicy()
        self.ledger_path = Path(ledger_path) if ledger_path else None
        self._lock = threading.RLock()
        self._held: dict[str, str] = {}  # point_id -> session_id
        self._last_zone_write: dict[str, float] = {}
        self._last_global_write: float = -math.inf
        self.sessions: dict[str, ExperimentSession] = {}

    # ------------------------------------------------------------------

    def _now(self, now: float | None) -> float:
        return self.building.clock if now is None else float(now)

    def _append_ledger(self, now: float, session_id: str, point_id: str | None, op: str,
                       value: float | None = None, reset_value: float | None = None) -> None:
        if self.ledger_path is None:
            return
        row: dict = {"ts": now, "session_id": session_id, "point_id": point_id, "op": op}
        if value is not None:
            row["value"] = value
        if reset_value is not None:
            row["reset_value"] = reset_value
        with self.ledger_path.open("a") as fh:
            fh.write(json.dumps(row) + "\n")

    # ------------------------------------------------------------------

    def begin_session(self, point_ids, now: float | None = None,
                      session_id: str | None = None) -> ExperimentSession:
        now = self._now(now)
        point_ids = list(point_ids)
        with self._lock:
            for pid in point_ids:
                if pid not in self.building.points:
                    raise UnknownPoint(pid)
                point = self.building.points[pid]
                if not point.writable:
                    raise NotWritable(f"{pid} ({point.ptype.value}) is read-only")
            for pid in point_ids:
                holder = self._held.get(pid)
                if holder is not None:
                    raise PointBusy(f"{pid} is held by session {holder}")
            sid = session_id or f"session-{next(_session_counter):04d}"
            session = ExperimentSession(session_id=sid, policy=self.policy)
            for pid in point_ids:
                point = self.building.points[pid]
                reset = self.building.effective_value(pid)
                session.ledger[pid] = WriteRecord(point_id=pid, zone_id=point.zone_id, reset_value=reset)
                self._held[pid] = sid
                self._append_ledger(now, sid, pid, "begin", reset_value=reset)
            self.sessions[sid] = session
            return session

    def safe_write(self, session: ExperimentSession, point_id: str, value: float,
                   now: float | None = None, kind: str = "experiment") -> WriteResult:
        """Admission-checked write at the experiment priority level.

        kind="experiment" consumes zone and global budgets; kind="clamp"
        (graph-surgery holds) skips the zone budget entirely.
        """
        now = self._now(now)
        if session.state is not SessionState.ACTIVE:
            raise SessionNotActive(f"{session.session_id} is {session.state.value}")
        record = session.ledger.get(point_id)
        if record is None:
            raise UnknownPoint(point_id)
        point = self.building.points[point_id]
        policy = self.policy
        with self._lock:
            if not policy.value_admissible(point, value, self.building):
                return WriteResult(False, point_id, value, reason="out_of_range")
            if kind == "experiment":
                last_zone = self._last_zone_write.get(point.zone_id, -math.inf)
                if now - last_zone < policy.per_zone_min_interval_s:
                    return WriteResult(False, point_id, value, reason="zone_rate_limited")
            if now - self._last_global_write < policy.global_min_interval_s:
                return WriteResult(False, point_id, value, reason="global_rate_limited")

            level = policy.experiment_priority_level
            reason = ""
            for _ in range(1 + policy.verify_retries):
                try:
                    self.building.apply_write(point_id, level, value)
                except ControllerRejected as exc:
                    reason = exc.reason
                    continue
                accepted = point.priority.slot(level)
                readback = self.building.effective_value(point_id)
                if accepted is not None and abs(readback - accepted) < 1e-9:
                    record.last_written_value = float(accepted)
                    record.last_write_timestamp = now
                    self._last_global_write = now
                    if kind == "experiment":
                        self._last_zone_write[point.zone_id] = now
                    self._append_ledger(now, session.session_id, point_id, "write", value=float(accepted))
                    return WriteResult(True, point_id, value, effective=float(readback))
                reason = f"readback {readback} != accepted {accepted}"
            # attempts hit the BMS even though the controller refused them
            self._last_global_write = now
            return WriteResult(False, point_id, value, reason=f"write_not_taken: {reason}")

    def relinquish(self, session: ExperimentSession, point_id: str,
                   now: float | None = None) -> float:
        """Empty the experiment slot for one point (rate-limit exempt)."""
        now = self._now(now)
        if session.state is not SessionState.ACTIVE:
            raise SessionNotActive(f"{session.session_id} is {session.state.value}")
        if point_id not in session.ledger:
            raise UnknownPoint(point_id)
        with self._lock:
            effective = self._relinquish_locked(session, point_id, now)
        return effective

    def _relinquish_locked(self, session: ExperimentSession, point_id: str, now: float) -> float:
        level = self.policy.experiment_priority_level
        point = self.building.points[point_id]
        occupied = point.priority.slot(level) is not None
        effective = self.building.apply_relinquish(point_id, level)
        if occupied:
            self._append_ledger(now, session.session_id, point_id, "relinquish")
        return effective

    def _terminate(self, session: ExperimentSession, now: float, state: SessionState) -> None:
        with self._lock:
            if session.state is not SessionState.ACTIVE:
                return
            for pid in session.ledger:
                self._relinquish_locked(session, pid, now)
                self._held.pop(pid, None)
            session.state = state
            self._append_ledger(now, session.session_id, None, "end")

    def rollback(self, session: ExperimentSession, now: float | None = None) -> None:
        """Relinquish every touched point; idempotent after the first call."""
        self._terminate(session, self._now(now), SessionState.ROLLED_BACK)

    def end_session(self, session: ExperimentSession, now: float | None = None) -> None:
        if session.state is not SessionState.ACTIVE:
            raise SessionNotActive(f"{session.session_id} is {session.state.value}")
        self._terminate(session, self._now(now), SessionState.COMPLETED)

    def query_status(self, session: ExperimentSession, point_id: str) -> WriteRecord:
        record = session.ledger.get(point_id)
        if record is None:
            raise UnknownPoint(point_id)
        return replace(record)

    # ------------------------------------------------------------------
    # crash recovery

    @staticmethod
    def pending_from_ledger(path: str | Path) -> dict[str, list[str]]:
        """session_id -> points whose experiment slot still needs relinquishing."""
        last_op: dict[tuple[str, str], str] = {}
        ended: set[str] = set()
        order: dict[tuple[str, str], int] = {}
        for i, line in enumerate(Path(path).read_text().splitlines()):
            if not line.strip():
                continue
            row = json.loads(line)
            sid, pid, op = row["session_id"], row["point_id"], row["op"]
            if op == "end":
                ended.add(sid)
            elif op in ("write", "relinquish"):
                last_op[(sid, pid)] = op
                order[(sid, pid)] = i
        pending: dict[str, list[str]] = {}
        for (sid, pid), op in sorted(last_op.items(), key=lambda kv: order[kv[0]]):
            if op == "write" and sid not in ended:
                pending.setdefault(sid, []).append(pid)
        return pending

    @classmethod
    def recover(cls, building: Building, ledger_path: str | Path,
                policy: SafetyPolicy | None = None) -> "Quiver":
        """Rebuild a guardian from a persisted ledger and roll back leftovers."""
        quiver = cls(building, policy=policy, ledger_path=ledger_path)
        now = building.clock
        for sid, pids in cls.pending_from_ledger(ledger_path).items():
            for pid in pids:
                building.apply_relinquish(pid, quiver.policy.experiment_priority_level)
                quiver._append_ledger(now, sid, pid, "relinquish")
            quiver._append_ledger(now, sid, None, "end")
        return quiver
