"""Co-location pipeline: pulse perturbations + low-frequency spectral ranking.

A pulse plan toggles one writable point (normally the Temperature Setpoint)
between its admissible extremes every dwell period, forcing the controlled
zone far from normal operation. Afterwards every point in the building is
compared against the perturbed reference trend over the controlled window;
the point of each type with the smallest LFT distance is selected as
co-located, but only when it beats the runner-up by a margin ratio — the
pipeline abstains rather than force full coverage. Without a type map,
outliers are flagged by robust (median/MAD) z-scores of LFT instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DwellTooShort, InsufficientWindow, OutOfRange, PlanAborted
from .features import FeatureVector, dtw_distance, lft_distances, mad_zscores, znormalize
from .points import OccupancyMode, Point, PointType
from .safety import ExperimentSession, Quiver
from .sim.building import Building

SETTLE_TAIL_S = 1800.0
MARGIN_THRESHOLD = 2.0
MAD_THRESHOLD = -3.5
# types the closing discussion documents as non-separable in outlier mode
NON_SEPARABLE_TYPES = (PointType.ZT, PointType.DC)
NIGHT_START_H = 21
NIGHT_END_H = 6


@dataclass(frozen=True)
class PulsePlan:
    target_point_id: str
    low: float
    high: float
    n_toggles: int
    dwell_s: float
    start: float

    @property
    def end(self) -> float:
        return self.start + self.n_toggles * self.dwell_s

    def writes(self) -> list[tuple[float, float]]:
        return [(self.start + k * self.dwell_s, self.low if k % 2 == 0 else self.high)
                for k in range(self.n_toggles)]


@dataclass(frozen=True)
class PlanWindow:
    t0: float
    t1: float
    reference_point_id: str
    controlled_zone: str
    pulse_period_s: float | None = None

    def whole_cycles(self) -> tuple[float, float]:
        """Largest [t0, t) spanning whole pulse periods.

        Spectral ranking on whole cycles keeps the reference fundamental in
        one bin; leakage from fractional cycles lets drifting uncontrolled
        zones partially overlap it. The settle tail stays in the captured
        window for reports.
        """
        if not self.pulse_period_s:
            return self.t0, self.t1
        n = math.floor((self.t1 - self.t0) / self.pulse_period_s)
        if n < 1:
            return self.t0, self.t1
        return self.t0, self.t0 + n * self.pulse_period_s


def is_night_or_weekend(t_s: float) -> bool:
    hour = (t_s / 3600.0) % 24.0
    weekend = int(t_s // 86400.0) % 7 >= 5
    return weekend or hour >= NIGHT_START_H or hour < NIGHT_END_H


def next_night(t_s: float) -> float:
    """The next 22:00 at or after t_s (plans run overnight)."""
    day = math.floor(t_s / 86400.0)
    candidate = day * 86400.0 + 22 * 3600.0
    return candidate if candidate >= t_s else candidate + 86400.0


def build_pulse_plan(point: Point, low: float, high: float, n_toggles: int,
                     dwell_s: float, start: float, quiver: Quiver) -> PulsePlan:
    if not (low < high):
        raise OutOfRange(f"pulse plan needs low < high, got {low} >= {high}")
    for v in (low, high):
        if not quiver.policy.value_admissible(point, v, quiver.building):
            raise OutOfRange(f"{v} outside policy range for {point.ptype.value}")
    if dwell_s < quiver.policy.per_zone_min_interval_s:
        raise DwellTooShort(
            f"dwell {dwell_s}s violates the {quiver.policy.per_zone_min_interval_s}s zone limit")
    return PulsePlan(point.id, low, high, n_toggles, dwell_s, start)


def execute_plan(quiver: Quiver, session: ExperimentSession, plan: PulsePlan,
                 *, allow_daytime: bool = False) -> PlanWindow:
    """Drive the building through a plan; rolls back on any rejected write."""
    building = quiver.building
    if not allow_daytime and not is_night_or_weekend(plan.start):
        raise PlanAborted(f"plan start {plan.start} is neither night nor weekend")
    if building.clock > plan.start:
        raise PlanAborted(f"plan starts at {plan.start} but clock is {building.clock}")
    building.run_until(plan.start)
    for t, value in plan.writes():
        building.run_until(t)
        result = quiver.safe_write(session, plan.target_point_id, value)
        if not result.accepted:
            quiver.rollback(session)
            raise PlanAborted(f"write of {value} rejected: {result.reason}")
    building.run_until(plan.end)
    quiver.relinquish(session, plan.target_point_id)
    building.run_until(plan.end + SETTLE_TAIL_S)
    zone = building.points[plan.target_point_id].zone_id
    return PlanWindow(plan.start, plan.end + SETTLE_TAIL_S, plan.target_point_id, zone,
                      pulse_period_s=2 * plan.dwell_s)


@dataclass
class TypeDecision:
    selected: str | None
    lft: float
    margin: float
    decided: bool
    given: bool = False  # the perturbed point itself
    correct: bool | None = None


@dataclass
class ColocationReport:
    controlled_zone: str
    reference_point_id: str
    decisions: dict[str, TypeDecision] = field(default_factory=dict)
    outliers: list[str] | None = None
    coverage: float = 0.0
    accuracy: float | None = None

    def recompute_coverage(self) -> None:
        decided = sum(1 for d in self.decisions.values() if d.decided and not d.given)
        self.coverage = decided / len(PointType)

    def to_json(self) -> dict:
        doc: dict = {
            "controlled_zone": self.controlled_zone,
            "reference_point": self.reference_point_id,
            "types": {
                t: {"selected": d.selected, "lft": d.lft, "margin": d.margin,
                    "decided": d.decided, "given": d.given, "correct": d.correct}
                for t, d in self.decisions.items()
            },
            "coverage": self.coverage,
            "accuracy": self.accuracy,
        }
        if self.outliers is not None:
            doc["outliers"] = self.outliers
        return doc


def _window_trends(building: Building, window: PlanWindow,
                   whole_cycles: bool = False) -> tuple[list[str], np.ndarray]:
    t0, t1 = window.whole_cycles() if whole_cycles else (window.t0, window.t1)
    pids = list(building.points)
    times, matrix = building.window_matrix(pids, t0, t1)
    expected = int((t1 - t0) / building.config.sampling_period_s)
    if times.size < max(2, expected - 1):
        raise InsufficientWindow(
            f"window [{t0}, {t1}) holds {times.size} samples, expected ~{expected}")
    return pids, matrix


def rank_candidates(building: Building, window: PlanWindow,
                    type_map: dict[str, str] | None,
                    *, margin_threshold: float = MARGIN_THRESHOLD,
                    mad_threshold: float = MAD_THRESHOLD) -> ColocationReport:
    """Select the controlled zone's point per type by minimum LFT distance."""
    pids, matrix = _window_trends(building, window, whole_cycles=True)
    ref_row = pids.index(window.reference_point_id)
    period = float(building.config.sampling_period_s)
    lft = lft_distances(matrix, matrix[ref_row], period)

    report = ColocationReport(window.controlled_zone, window.reference_point_id)
    ref_type = building.points[window.reference_point_id].ptype.value

    if type_map is None:
        # constant night trends make >half the LFT values exactly equal and
        # the MAD collapses to 0; rescale by the deviating points' own MAD so
        # ordinary noisy trends (SAF, DC) stay inside the fence
        med = float(np.median(lft))
        dev = np.abs(lft - med)
        mad = float(np.median(dev))
        if mad < 1e-9:
            nonzero = dev[dev > 1e-9]
            mad = float(np.median(nonzero)) if nonzero.size else 0.0
        scale = 1.4826 * max(mad, 1e-12)
        z = (lft - med) / scale
        report.outliers = [pid for pid, zi, i in zip(pids, z, range(len(pids)))
                           if zi < mad_threshold and i != ref_row]
        return report

    by_type: dict[str, list[tuple[str, float]]] = {}
    for i, pid in enumerate(pids):
        if i == ref_row:
            continue
        by_type.setdefault(type_map[pid], []).append((pid, float(lft[i])))
    for tname, entries in sorted(by_type.items()):
        entries.sort(key=lambda e: e[1])
        best_pid, best = entries[0]
        runner = entries[1][1] if len(entries) > 1 else math.inf
        if best == 0.0:
            margin = math.inf if runner > 0 else 1.0
        else:
            margin = runner / best
        decided = margin >= margin_threshold
        report.decisions[tname] = TypeDecision(
            selected=best_pid if decided else None,
            lft=best, margin=margin, decided=decided)
    report.decisions[ref_type] = TypeDecision(
        selected=window.reference_point_id, lft=0.0, margin=math.inf,
        decided=False, given=True)
    report.recompute_coverage()
    return report


def colocation_features(building: Building, window: PlanWindow) -> list[FeatureVector]:
    """Full per-point co-location feature vectors (for reports and plots)."""
    pids, matrix = _window_trends(building, window)
    ref = znormalize(matrix[pids.index(window.reference_point_id)])
    period = float(building.config.sampling_period_s)
    lft = lft_distances(matrix, matrix[pids.index(window.reference_point_id)], period)
    out = []
    for i, pid in enumerate(pids):
        row = matrix[i]
        values = {
            "range": float(row.max() - row.min()),
            "mean": float(row.mean()),
            "std": float(row.std()),
            "dtw": dtw_distance(znormalize(row), ref),
            "lft": float(lft[i]),
        }
        out.append(FeatureVector(values=values, point_id=pid,
                                 window=(window.t0, window.t1), feature_set="colocation"))
    return out


def evaluate_colocation(report: ColocationReport, point_zone: dict[str, str]) -> tuple[float | None, float]:
    """(accuracy over decided types, coverage over all 16 types)."""
    decided = [d for d in report.decisions.values() if d.decided and not d.given]
    for d in decided:
        d.correct = point_zone[d.selected] == report.controlled_zone
    report.recompute_coverage()
    if decided:
        report.accuracy = sum(1 for d in decided if d.correct) / len(decided)
    else:
        report.accuracy = None
    return report.accuracy, report.coverage


def merge_reports(primary: ColocationReport, auxiliary: ColocationReport) -> ColocationReport:
    """Fold an auxiliary (OC) run's decisions into the main report."""
    for tname, dec in auxiliary.decisions.items():
        current = primary.decisions.get(tname)
        if dec.given:
            # the OC point itself was perturbed; its co-location is confirmed
            primary.decisions[tname] = TypeDecision(
                selected=dec.selected, lft=0.0, margin=math.inf, decided=True)
        elif current is None or not (current.decided or current.given):
            primary.decisions[tname] = dec
    primary.recompute_coverage()
    return primary


def run_ts_plan(quiver: Quiver, zone_id: str, *, pulses: int = 4, dwell_s: float = 3600.0,
                start: float | None = None, allow_daytime: bool = False,
                occupy_first: bool = True) -> PlanWindow:
    """Setpoint pulse plan on one zone.

    With occupy_first the zone is commanded Occupied one zone-budget period
    before the pulses begin: the narrow occupied guardband turns the 62/78°F
    toggles into ±6°F excursions instead of ±2°F, so responses dominate the
    settle-in transient. Both points are relinquished when the session ends.
    """
    building = quiver.building
    point = building.zone_point(zone_id, PointType.TS)
    lo, hi = quiver.policy.ts_range
    start = next_night(building.clock) if start is None else start
    plan = build_pulse_plan(point, lo, hi, pulses, dwell_s, start, quiver)
    pids = [point.id]
    oc_point = None
    if occupy_first:
        oc_point = building.zone_point(zone_id, PointType.OC)
        pids.append(oc_point.id)
    session = quiver.begin_session(pids)
    try:
        if oc_point is not None:
            building.run_until(start - quiver.policy.per_zone_min_interval_s)
            result = quiver.safe_write(session, oc_point.id, float(OccupancyMode.OCCUPIED))
            if not result.accepted:
                quiver.rollback(session)
                raise PlanAborted(f"occupy precondition rejected: {result.reason}")
        window = execute_plan(quiver, session, plan, allow_daytime=allow_daytime)
    finally:
        if session.state is not None and session.state.value == "Active":
            quiver.end_session(session)
    return window


def run_oc_plan(quiver: Quiver, zone_id: str, *, pulses: int = 4, dwell_s: float = 3600.0,
                start: float | None = None, allow_daytime: bool = False) -> PlanWindow:
    """Auxiliary experiment: oscillate the Occupied Command instead of TS."""
    building = quiver.building
    point = building.zone_point(zone_id, PointType.OC)
    start = next_night(building.clock) if start is None else start
    plan = build_pulse_plan(point, float(OccupancyMode.OCCUPIED),
                            float(OccupancyMode.UNOCCUPIED), pulses, dwell_s, start, quiver)
    session = quiver.begin_session([point.id])
    try:
        window = execute_plan(quiver, session, plan, allow_daytime=allow_daytime)
    finally:
        if session.state.value == "Active":
            quiver.end_session(session)
    return window


def run_colocation(quiver: Quiver, zone_id: str, *, pulses: int = 4, dwell_s: float = 3600.0,
                   with_oc: bool = True, evaluate: bool = True) -> tuple[ColocationReport, list[PlanWindow]]:
    """TS pulse plan, optional auxiliary OC plan, ranking and evaluation."""
    building = quiver.building
    truth = building.ground_truth()
    windows = [run_ts_plan(quiver, zone_id, pulses=pulses, dwell_s=dwell_s)]
    report = rank_candidates(building, windows[0], truth.point_type)
    if with_oc:
        windows.append(run_oc_plan(quiver, zone_id, pulses=pulses, dwell_s=dwell_s))
        aux = rank_candidates(building, windows[1], truth.point_type)
        report = merge_reports(report, aux)
    if evaluate:
        evaluate_colocation(report, truth.point_zone)
    return report, windows
