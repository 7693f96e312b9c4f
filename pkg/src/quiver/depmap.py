"""Dependency mapping: probe experiments, candidate graph, graph surgery.

Each writable actuator is driven to a random admissible value every 20
minutes for 6 hours. After every accepted write, each co-located point is
watched for 10 minutes; it "changed" if any sample deviates from the
pre-write mean (12 minutes of history) by more than one pre-write standard
deviation, floored at 0.5% of the point's full-scale range so a quiescent
trend cannot produce a degenerate threshold. The change probability per
point is the ratio of changed windows to accepted writes.

Edges with probability >= 0.5 become candidates. Candidate edges reachable
through longer directed paths ("cycles" in the loose sense: multiple routes
between two points) are then re-tested with graph surgery: the intermediate
witnesses are clamped at their current values while the source is perturbed
six more times; the edge is verified only if the target still changes in at
least half of the perturbations, otherwise refuted. Perturbation draws are
regime-conditioned (e.g. setpoint draws stay on the cooling side of the
current zone temperature when the target is a cooling-chain actuator) so the
tested mechanism is actually active — the preconditioning-write pattern.

Probes and surgeries run at night or on weekends; the Occupied Command probe
runs on a weekend afternoon when cooling demand is real, so mode flips move
the cooling chain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CannotClamp, MissingProbe, NodeSetMismatch
from .points import ACTUATOR_TYPES, OccupancyMode, Point, PointType
from .safety import ExperimentSession, Quiver
from .sim.building import Building, LockoutEvent

PROBE_INTERVAL_S = 1200.0
PROBE_DURATION_S = 6 * 3600.0
OBSERVE_S = 600.0
PRE_WINDOW_S = 720.0
EPS_FLOOR_FRACTION = 0.005
P_MIN = 0.5
SURGERY_PERTURBS = 6
SURGERY_SETTLE_S = 3600.0

# Min/MaxSupplyFlow are constants and RVC is observed-only; six probe sources.
PROBE_SOURCES = (PointType.TS, PointType.OC, PointType.CC,
                 PointType.HC, PointType.SAFS, PointType.DC)
HEATING_NODES = {PointType.HC, PointType.RVC}


# ---------------------------------------------------------------------------
# change detector

def eps_floor(point: Point, building: Building) -> float:
    unit = point.ptype.unit
    if unit in ("%-command", "%-open"):
        span = 100.0
    elif unit == "CFM":
        span = building.zone_config(point.zone_id).max_flow
    elif unit == "°F":
        span = 16.0  # the admissible setpoint span (62-78°F)
    elif unit == "mode":
        span = 2.0
    else:
        span = 1.0
    return EPS_FLOOR_FRACTION * span


def change_detected(building: Building, point_id: str, write_t: float,
                    floor: float) -> bool:
    """Did the point move in the 10 minutes after the write?

    The observation window's mean is compared against the pre-write mean;
    comparing individual samples would trip on any noisy point (one in three
    samples exceeds one sigma by chance), which is exactly the degenerate
    behavior the std floor exists to avoid.
    """
    pre_t, pre_v = building.window(point_id, write_t - PRE_WINDOW_S, write_t)
    post_t, post_v = building.window(point_id, write_t, write_t + OBSERVE_S)
    if pre_v.size == 0 or post_v.size == 0:
        return False
    threshold = max(float(pre_v.std()), floor)
    return bool(abs(float(post_v.mean()) - float(pre_v.mean())) > threshold)


# ---------------------------------------------------------------------------
# scheduled-write engine

@dataclass
class ScheduledWrite:
    t: float
    point_id: str
    value: float | Callable[[Building], float | None]
    kind: str = "experiment"  # experiment | clamp
    tag: str = ""


@dataclass
class ExecutedWrite:
    t: float
    point_id: str
    value: float
    accepted: bool
    reason: str | None
    tag: str


def execute_schedule(quiver: Quiver, session: ExperimentSession,
                     writes: list[ScheduledWrite], until: float) -> list[ExecutedWrite]:
    """Drive the building, issuing writes at their scheduled steps.

    At most one write per simulation step: with a 30 s step this enforces the
    10 s global spacing structurally; same-step collisions are pushed to the
    following step (zone budgets only ever see later writes).
    """
    building = quiver.building
    queue = sorted(writes, key=lambda w: w.t)
    log: list[ExecutedWrite] = []
    i = 0
    while building.clock < until - 1e-9:
        if i < len(queue) and queue[i].t <= building.clock + 1e-9:
            w = queue[i]
            i += 1
            value = w.value(building) if callable(w.value) else w.value
            if value is not None:
                res = quiver.safe_write(session, w.point_id, float(value), kind=w.kind)
                log.append(ExecutedWrite(building.clock, w.point_id, float(value),
                                         res.accepted, res.reason, w.tag))
        building.step()
    return log


# ---------------------------------------------------------------------------
# experiment windows

def next_night(clock: float) -> float:
    day = math.floor(clock / 86400.0)
    start = day * 86400.0 + 22 * 3600.0
    return start if start >= clock else start + 86400.0


def next_weekend_afternoon(clock: float) -> float:
    """Next Saturday/Sunday 12:00 (building days start on a Monday)."""
    day = math.floor(clock / 86400.0)
    for d in range(day, day + 9):
        if d % 7 >= 5:
            start = d * 86400.0 + 12 * 3600.0
            if start >= clock:
                return start
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# random draws

def probe_draw(ptype: PointType, zone_cfg, rng: np.random.Generator,
               prev: float | None) -> float:
    if ptype is PointType.OC:
        modes = [m for m in (1.0, 2.0, 3.0) if prev is None or m != prev]
        return float(rng.choice(modes))
    if ptype is PointType.TS:
        lo, hi = 62.0, 78.0
    elif ptype is PointType.SAFS:
        lo, hi = zone_cfg.min_flow, zone_cfg.max_flow
    else:
        lo, hi = 0.0, 100.0
    while True:
        v = float(rng.uniform(lo, hi))
        if prev is None or abs(v - prev) > 1e-6:
            return v


# ---------------------------------------------------------------------------
# probes

@dataclass
class PointChangeStat:
    changes: int
    writes: int

    @property
    def probability(self) -> float:
        return self.changes / self.writes if self.writes else 0.0


@dataclass
class ProbeResult:
    source: str            # actuator type symbol
    zone_id: str
    writes_attempted: int
    writes_accepted: int
    observed: dict[str, PointChangeStat] = field(default_factory=dict)  # point_id -> stat

    def probability_by_type(self, type_map: dict[str, str]) -> dict[str, float]:
        out: dict[str, float] = {}
        for pid, stat in self.observed.items():
            t = type_map[pid]
            out[t] = max(out.get(t, 0.0), stat.probability)
        return out


def _preset_writes(source: PointType, zone_id: str, building: Building,
                   start: float) -> list[ScheduledWrite]:
    """Regime preconditioning ahead of a probe (each consumes zone budget)."""
    zone_point = building.zone_point
    zi = building.zone_ids.index(zone_id)

    def ts_near_zt(offset: float) -> Callable[[Building], float]:
        return lambda b: float(np.clip(b.zt[zi] + offset, 62.0, 78.0))

    if source is PointType.OC:
        # weekend afternoon, cooling side: mode flips move CC and the chain
        return [ScheduledWrite(start - 600.0, zone_point(zone_id, PointType.TS).id,
                               ts_near_zt(-3.0), tag="preset")]
    if source is PointType.TS:
        # the narrow occupied band makes most setpoint draws bite
        return [ScheduledWrite(start - 600.0, zone_point(zone_id, PointType.OC).id,
                               float(OccupancyMode.OCCUPIED), tag="preset")]
    if source is PointType.HC:
        # pre-cool for headroom below HS, then force the heating regime
        return [
            ScheduledWrite(start - 4200.0, zone_point(zone_id, PointType.TS).id,
                           62.0, tag="preset"),
            ScheduledWrite(start - 1200.0, zone_point(zone_id, PointType.OC).id,
                           float(OccupancyMode.OCCUPIED), tag="preset"),
            ScheduledWrite(start - 600.0, zone_point(zone_id, PointType.TS).id,
                           78.0, tag="preset"),
        ]
    if source in (PointType.CC, PointType.SAFS):
        # pin the heating setpoint far below anything reachable by cooling
        return [ScheduledWrite(start - 600.0, zone_point(zone_id, PointType.TS).id,
                               62.0, tag="preset")]
    return []


def probe_actuator(quiver: Quiver, session: ExperimentSession, point: Point,
                   rng: np.random.Generator,
                   *, duration_s: float = PROBE_DURATION_S,
                   interval_s: float = PROBE_INTERVAL_S,
                   start: float | None = None,
                   preset: bool = True) -> ProbeResult:
    """Drive one actuator with random values and record who reacts."""
    building = quiver.building
    zone_id = point.zone_id
    zone_cfg = building.zone_config(zone_id)
    if start is None:
        start = (next_weekend_afternoon(building.clock + 1800.0)
                 if point.ptype is PointType.OC else next_night(building.clock + 1800.0))
    writes = _preset_writes(point.ptype, zone_id, building, start) if preset else []
    n_writes = int(duration_s // interval_s)
    draws: list[float] = []
    prev = None
    for _ in range(n_writes):
        v = probe_draw(point.ptype, zone_cfg, rng, prev)
        draws.append(v)
        prev = v
    for k, v in enumerate(draws):
        writes.append(ScheduledWrite(start + k * interval_s, point.id, v, tag="probe"))
    until = start + (n_writes - 1) * interval_s + OBSERVE_S + 60.0
    log = execute_schedule(quiver, session, writes, until)

    accepted = [w for w in log if w.tag == "probe" and w.accepted]
    attempted = [w for w in log if w.tag == "probe"]
    result = ProbeResult(point.ptype.value, zone_id, len(attempted), len(accepted))
    for other in building.zone_points(zone_id):
        if other.id == point.id:
            continue
        floor = eps_floor(other, building)
        changes = sum(1 for w in accepted if change_detected(building, other.id, w.t, floor))
        result.observed[other.id] = PointChangeStat(changes, len(accepted))
    return result


# ---------------------------------------------------------------------------
# graphs

@dataclass
class DependencyEdge:
    src: str
    dst: str
    probability: float
    status: str = "candidate"  # candidate | verified | refuted


@dataclass
class DependencyGraph:
    zone_id: str
    nodes: list[str]
    edges: dict[tuple[str, str], DependencyEdge] = field(default_factory=dict)

    def present_edges(self, statuses=("verified",)) -> set[tuple[str, str]]:
        return {k for k, e in self.edges.items() if e.status in statuses}

    def to_json(self) -> dict:
        return {
            "zone": self.zone_id,
            "nodes": self.nodes,
            "edges": [
                {"from": e.src, "to": e.dst, "probability": e.probability, "status": e.status}
                for e in self.edges.values()
            ],
        }


def build_candidate_graph(results: dict[str, ProbeResult], nodes: list[str],
                          type_map: dict[str, str], p_min: float = P_MIN,
                          zone_id: str = "") -> DependencyGraph:
    """Edge u->v iff probing u changed v's point with probability >= p_min."""
    sources = [t.value for t in PROBE_SOURCES if t.value in nodes]
    missing = [s for s in sources if s not in results]
    if missing:
        raise MissingProbe(f"no probe result for {missing}")
    graph = DependencyGraph(zone_id=zone_id or next(iter(results.values())).zone_id,
                            nodes=list(nodes))
    for src, result in results.items():
        for dst, prob in result.probability_by_type(type_map).items():
            if dst in nodes and dst != src and prob >= p_min:
                graph.edges[(src, dst)] = DependencyEdge(src, dst, prob)
    return graph


def find_multipath_pairs(graph: DependencyGraph) -> dict[tuple[str, str], set[str]]:
    """Candidate edges that are also reachable via longer directed paths.

    Witnesses are every intermediate node on any u->...->v path of length
    >= 2, found by exhaustive path enumeration (node sets here are <= 7).
    """
    adj: dict[str, set[str]] = {}
    for (u, v) in graph.edges:
        adj.setdefault(u, set()).add(v)
    out: dict[tuple[str, str], set[str]] = {}
    for (u, v) in graph.edges:
        witnesses: set[str] = set()

        def walk(node: str, visited: frozenset[str]):
            for nxt in adj.get(node, ()):  # noqa: B023
                if nxt == v:  # noqa: B023
                    if node != u:  # noqa: B023
                        witnesses.update(visited - {u})  # noqa: B023
                elif nxt not in visited and nxt != u:  # noqa: B023
                    walk(nxt, visited | {nxt})

        walk(u, frozenset({u}))
        if witnesses:
            out[(u, v)] = witnesses
    return out


# ---------------------------------------------------------------------------
# graph surgery

@dataclass
class SurgeryOutcome:
    edge: tuple[str, str]
    zone_id: str
    verified: bool
    changes: int
    perturbs_accepted: int
    window: tuple[float, float]


def _surgery_draw_fn(u: PointType, v: PointType, zone_idx: int,
                     zone_cfg, rng: np.random.Generator) -> Callable[[Building], float]:
    """Regime-conditioned perturbation values for the edge under test."""
    state = {"prev": None}

    def draw(building: Building) -> float:
        zt = float(building.zt[zone_idx])
        if u is PointType.TS:
            if v in HEATING_NODES:
                lo, hi = min(zt + 2.5, 76.0), min(zt + 6.0, 78.0)
            else:
                lo, hi = max(zt - 6.0, 62.0), max(zt - 2.5, 64.0)
            lo, hi = min(lo, hi - 0.1), hi
            v_new = float(rng.uniform(lo, hi))
            while state["prev"] is not None and abs(v_new - state["prev"]) < 1e-6:
                v_new = float(rng.uniform(lo, hi))
        else:
            v_new = probe_draw(u, zone_cfg, rng, state["prev"])
        state["prev"] = v_new
        return v_new

    return draw


def graph_surgery(quiver: Quiver, session: ExperimentSession, zone_id: str,
                  edge: tuple[str, str], witnesses: set[str],
                  rng: np.random.Generator, *, start: float | None = None,
                  n_perturbs: int = SURGERY_PERTURBS) -> SurgeryOutcome:
    """Clamp the witnesses, perturb the source, watch the target.

    The zone is left to settle for an hour first; preconditioning writes put
    it in a regime where the target can react at all (heating engaged for
    HC/RVC targets, cooling for the airflow chain).
    """
    building = quiver.building
    u = PointType(edge[0])
    v = PointType(edge[1])
    zone_cfg = building.zone_config(zone_id)
    zone_idx = building.zone_ids.index(zone_id)
    for w in witnesses:
        if not PointType(w).writable:
            raise CannotClamp(f"witness {w} is not writable")

    if start is None:
        start = next_night(building.clock + SURGERY_SETTLE_S + 1800.0)
    building.run_until(start - SURGERY_SETTLE_S)
    building.run_until(start - 1500.0)

    writes: list[ScheduledWrite] = []
    heating_regime = v in HEATING_NODES or u in HEATING_NODES

    def ts_preset(b: Building) -> float:
        zt = float(b.zt[zone_idx])
        return float(np.clip(zt + (3.0 if heating_regime else -3.0), 62.0, 78.0))

    if heating_regime:
        # pre-cool during the settle hour so heating keeps headroom below HS
        writes.append(ScheduledWrite(start - SURGERY_SETTLE_S + 60.0,
                                     building.zone_point(zone_id, PointType.TS).id,
                                     62.0, tag="preset"))
    t = start - 1380.0
    if u is not PointType.OC and PointType.OC.value not in witnesses:
        # occupied mode narrows the band so draws bite; also enables HC writes
        writes.append(ScheduledWrite(t, building.zone_point(zone_id, PointType.OC).id,
                                     float(OccupancyMode.OCCUPIED), tag="preset"))
        t += 600.0
    if u is not PointType.TS and PointType.TS.value not in witnesses and u is not PointType.OC:
        preset_val: float | Callable[[Building], float]
        if u is PointType.HC or heating_regime:
            preset_val = 78.0
        else:
            preset_val = 62.0
        writes.append(ScheduledWrite(t, building.zone_point(zone_id, PointType.TS).id,
                                     preset_val, tag="preset"))

    clamp_t = start - 300.0
    for w in sorted(witnesses):
        pid = building.zone_point(zone_id, PointType(w)).id
        writes.append(ScheduledWrite(
            clamp_t, pid, lambda b, p=pid: b.effective_value(p), kind="clamp", tag="clamp"))
        clamp_t += 60.0

    draw = _surgery_draw_fn(u, v, zone_idx, zone_cfg, rng)
    u_pid = building.zone_point(zone_id, u).id
    for k in range(n_perturbs):
        writes.append(ScheduledWrite(start + k * PROBE_INTERVAL_S, u_pid, draw, tag="perturb"))
        if u is PointType.OC:
            # keep the setpoint pinned near the drifting zone temperature
            writes.append(ScheduledWrite(start + k * PROBE_INTERVAL_S - 600.0,
                                         building.zone_point(zone_id, PointType.TS).id,
                                         ts_preset, tag="preset"))

    until = start + (n_perturbs - 1) * PROBE_INTERVAL_S + OBSERVE_S + 60.0
    log = execute_schedule(quiver, session, writes, until)

    v_point = building.zone_point(zone_id, v)
    floor = eps_floor(v_point, building)
    accepted = [w for w in log if w.tag == "perturb" and w.accepted]
    changes = sum(1 for w in accepted if change_detected(building, v_point.id, w.t, floor))
    verified = len(accepted) > 0 and changes >= math.ceil(len(accepted) / 2)

    # relinquish the clamps and the source so the zone returns to normal
    for w in sorted(witnesses):
        quiver.relinquish(session, building.zone_point(zone_id, PointType(w)).id)
    quiver.relinquish(session, u_pid)
    return SurgeryOutcome(edge, zone_id, verified, changes, len(accepted),
                          (start - SURGERY_SETTLE_S, until))


# ---------------------------------------------------------------------------
# evaluation

@dataclass
class GraphMetrics:
    accuracy: float
    fp_rate: float
    fn_rate: float
    fp: int
    fn: int
    pairs: int
    zt_attributed_fraction: float

    def to_json(self) -> dict:
        return {
            "accuracy": self.accuracy, "fp": self.fp_rate, "fn": self.fn_rate,
            "fp_count": self.fp, "fn_count": self.fn, "pairs": self.pairs,
            "zt_attributed": self.zt_attributed_fraction,
        }


def evaluate_graph(final: DependencyGraph, truth_edges: set[tuple[str, str]],
                   truth_nodes: list[str],
                   surgery_windows: dict[tuple[str, str], tuple[float, float]] | None = None,
                   lockout_events: list[LockoutEvent] | None = None) -> GraphMetrics:
    """Ordered-pair accuracy/FP/FN against the simulator wiring.

    Errors whose surgery window overlaps a heating/cooling lockout event in
    the zone are tagged as ZT-attributed, mirroring how the external variable
    ZT disables commands regardless of the write that was under test.
    """
    if set(final.nodes) != set(truth_nodes):
        raise NodeSetMismatch(f"{sorted(final.nodes)} vs {sorted(truth_nodes)}")
    predicted = final.present_edges()
    nodes = sorted(final.nodes)
    pairs = [(u, v) for u in nodes for v in nodes if u != v]
    fp = [p for p in pairs if p in predicted and p not in truth_edges]
    fn = [p for p in pairs if p not in predicted and p in truth_edges]
    errors = fp + fn
    zt_attr = 0
    if surgery_windows and lockout_events:
        for e in errors:
            win = surgery_windows.get(e)
            if win and any(ev.zone_id == final.zone_id and win[0] <= ev.t < win[1]
                           for ev in lockout_events):
                zt_attr += 1
    accuracy = 1.0 - len(errors) / len(pairs)
    return GraphMetrics(
        accuracy=accuracy, fp_rate=len(fp) / len(pairs), fn_rate=len(fn) / len(pairs),
        fp=len(fp), fn=len(fn), pairs=len(pairs),
        zt_attributed_fraction=zt_attr / len(errors) if errors else 0.0,
    )


def probability_matrix(results: dict[str, ProbeResult], nodes: list[str],
                       type_map: dict[str, str]) -> list[tuple[str, str, float]]:
    """(controlled, observed, probability) rows for the color-map export."""
    rows = []
    for src in (t.value for t in PROBE_SOURCES):
        if src not in results:
            continue
        probs = results[src].probability_by_type(type_map)
        for dst in nodes:
            if dst != src:
                rows.append((src, dst, probs.get(dst, 0.0)))
    return rows


# ---------------------------------------------------------------------------
# per-zone pipeline

@dataclass
class ZoneDepmapResult:
    zone_id: str
    probes: dict[str, ProbeResult]
    candidate: DependencyGraph
    final: DependencyGraph
    surgeries: list[SurgeryOutcome]
    metrics: GraphMetrics


def run_zone_depmap(quiver: Quiver, zone_id: str, rng: np.random.Generator,
                    *, probe_duration_s: float = PROBE_DURATION_S) -> ZoneDepmapResult:
    """Full protocol for one zone: probe all actuators, build, verify, score."""
    building = quiver.building
    truth = building.ground_truth()
    nodes = truth.zone_nodes[zone_id]
    points = {t.value: building.zone_point(zone_id, t)
              for t in ACTUATOR_TYPES if t.value in nodes}
    session = quiver.begin_session([p.id for p in points.values()])
    try:
        probes: dict[str, ProbeResult] = {}
        for src in PROBE_SOURCES:
            if src.value not in nodes:
                continue
            probes[src.value] = probe_actuator(quiver, session, points[src.value], rng,
                                               duration_s=probe_duration_s)
            # leave the zone relinquished and settling between probes
            quiver.relinquish(session, points[src.value].id)
            for other in points.values():
                quiver.relinquish(session, other.id)

        candidate = build_candidate_graph(probes, nodes, truth.point_type, zone_id=zone_id)
        multipath = find_multipath_pairs(candidate)

        final = DependencyGraph(zone_id=zone_id, nodes=list(nodes))
        surgeries: list[SurgeryOutcome] = []
        windows: dict[tuple[str, str], tuple[float, float]] = {}
        for key, edge in sorted(candidate.edges.items()):
            witnesses = multipath.get(key, set())
            outcome = graph_surgery(quiver, session, zone_id, key, witnesses, rng)
            surgeries.append(outcome)
            windows[key] = outcome.window
            status = "verified" if outcome.verified else "refuted"
            final.edges[key] = DependencyEdge(edge.src, edge.dst, edge.probability, status)

        truth_edges = {(u, v) for u, v in truth.zone_edges[zone_id]}
        metrics = evaluate_graph(final, truth_edges, nodes, windows, building.lockout_events)
        return ZoneDepmapResult(zone_id, probes, candidate, final, surgeries, metrics)
    finally:
        if session.state.value == "Active":
            quiver.end_session(session)
