"""Safe crew-dispatch: risk-weighted travel graph, tour search, AHP ranking.

The travel graph reuses the network's edge geometry (crew speed configurable,
default 40 km/h). Arc cost is travel_hours * (1 + beta * risk); arcs whose
midpoint falls in a no-go zone are blocked outright. Tasks whose own position
is inside a no-go zone are deferred rather than routed.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import grid, hotspot, metrics, restoration
from .errors import (
    IoError,
    AllTasksDeferred,
    InvalidTransition,
    NoFeasiblePlan,
    ParseError,
    Unreachable,
    UnknownRoute,
    ValidationError,
)
from .kernels import tour_search

DEFAULT_SPEED_KMH = 40.0
DEFAULT_BETA = 4.0
DEFAULT_K = 3
MAX_TASKS = 9

_TASK_KEYS = {"id", "target", "repair_hours", "repair_cost", "requires_parts"}


@dataclass(frozen=True)
class RepairTask:
    id: str
    target: str  # node id or edge id
    repair_hours: float
    repair_cost: float = 0.0
    requires_parts: bool = False


@dataclass(frozen=True)
class Arc:
    src: str
    dst: str
    travel_hours: float
    risk: float
    blocked: bool
    cost: float


@dataclass(frozen=True)
class TravelGraph:
    net: grid.Network
    field: hotspot.RiskField
    theta: float
    beta: float
    arcs: tuple[Arc, ...]

    @property
    def adjacency(self) -> dict[str, list[Arc]]:
        adj: dict[str, list[Arc]] = {n.id: [] for n in self.net.nodes}
        for a in self.arcs:
            adj[a.src].append(a)
        return adj


@dataclass
class CrewRoute:
    id: str
    task_order: tuple[str, ...]
    legs: tuple[tuple[str, ...], ...]
    total_travel_hours: float
    weighted_cost: float
    max_leg_risk: float
    indicators: metrics.ResilienceIndicators | None = None
    composite: float = 0.0
    status: str = "candidate"
    deferred: tuple[str, ...] = ()
    history: list = field(default_factory=list)


def load_tasks(path, net: grid.Network) -> list[RepairTask]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, list):
        raise ParseError("task file must be a JSON array")
    tasks = []
    for i, obj in enumerate(doc):
        unknown = set(obj) - _TASK_KEYS
        if unknown:
            raise ParseError(f"tasks[{i}]: unknown keys {sorted(unknown)}")
        task = RepairTask(
            id=str(obj["id"]),
            target=str(obj["target"]),
            repair_hours=float(obj["repair_hours"]),
            repair_cost=float(obj.get("repair_cost", 0.0)),
            requires_parts=bool(obj.get("requires_parts", False)),
        )
        if task.repair_hours <= 0:
            raise ValidationError(f"task {task.id}: repair_hours must be positive")
        if task.target not in net.node_map and task.target not in net.edge_map:
            raise ValidationError(f"task {task.id}: unknown target {task.target!r}")
        tasks.append(task)
    ids = [t.id for t in tasks]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate task ids")
    return tasks


def task_position(net: grid.Network, task: RepairTask) -> tuple[float, float]:
    if task.target in net.node_map:
        n = net.node_map[task.target]
        return n.lat, n.lon
    e = net.edge_map[task.target]
    a, b = net.node_map[e.src], net.node_map[e.dst]
    return (a.lat + b.lat) / 2.0, (a.lon + b.lon) / 2.0


def task_vertex(net: grid.Network, task: RepairTask) -> str:
    """Travel destination: the node itself, or an edge's from-endpoint."""
    if task.target in net.node_map:
        return task.target
    return net.edge_map[task.target].src


def build_travel_graph(
    net: grid.Network,
    field: hotspot.RiskField,
    theta: float = hotspot.DEFAULT_NO_GO_THRESHOLD,
    beta: float = DEFAULT_BETA,
    speed_kmh: float = DEFAULT_SPEED_KMH,
) -> TravelGraph:
    if beta < 0:
        raise ValidationError("beta must be nonnegative")
    if not 0.0 < theta <= 1.0:
        raise ValidationError("theta must be in (0, 1]")
    arcs = []
    for e in net.edges:
        a, b = net.node_map[e.src], net.node_map[e.dst]
        mid_lat, mid_lon = (a.lat + b.lat) / 2.0, (a.lon + b.lon) / 2.0
        risk = hotspot.point_risk(field, mid_lat, mid_lon)
        blocked = risk >= theta
        hours = e.length_km / speed_kmh
        cost = hours * (1.0 + beta * risk)
        arcs.append(Arc(e.src, e.dst, hours, risk, blocked, cost))
        arcs.append(Arc(e.dst, e.src, hours, risk, blocked, cost))
    return TravelGraph(net=net, field=field, theta=theta, beta=beta, arcs=tuple(arcs))


def shortest_path(g: TravelGraph, a: str, b: str) -> tuple[list[str], float]:
    """Min weighted-cost path over unblocked arcs; ties broken by the
    lexicographically smallest vertex-id sequence."""
    if a not in g.net.node_map or b not in g.net.node_map:
        raise ValidationError(f"unknown endpoint {a!r} or {b!r}")
    if a == b:
        return [], 0.0
    adj = g.adjacency
    heap: list[tuple[float, tuple[str, ...]]] = [(0.0, (a,))]
    done: set[str] = set()
    while heap:
        cost, path = heapq.heappop(heap)
        v = path[-1]
        if v in done:
            continue
        done.add(v)
        if v == b:
            return list(path), cost
        for arc in adj[v]:
            if arc.blocked or arc.dst in done:
                continue
            heapq.heappush(heap, (cost + arc.cost, path + (arc.dst,)))
    raise Unreachable(f"no unblocked path from {a!r} to {b!r}")


def _leg_metrics(g: TravelGraph, path: list[str]) -> tuple[float, float]:
    """(travel_hours, max_risk) along a vertex path, taking the cheapest arc
    between each consecutive pair."""
    adj = g.adjacency
    hours = 0.0
    max_risk = 0.0
    for u, v in zip(path, path[1:]):
        best = min((a for a in adj[u] if a.dst == v and not a.blocked), key=lambda a: a.cost)
        hours += best.travel_hours
        max_risk = max(max_risk, best.risk)
    return hours, max_risk


def candidate_routes(
    g: TravelGraph, tasks: list[RepairTask], k: int = DEFAULT_K
) -> tuple[list[CrewRoute], list[RepairTask]]:
    """k lowest-weighted-cost visit orders (open tours from the depot).

    Returns (candidates, deferred). No-go-sited tasks are deferred; all
    permutations of the rest are evaluated exhaustively.
    """
    if not 1 <= len(tasks) <= MAX_TASKS:
        raise ValidationError(f"need 1..{MAX_TASKS} tasks, got {len(tasks)}")
    if k < 1:
        raise ValidationError("k must be >= 1")
    net = g.net
    deferred = []
    active = []
    for t in sorted(tasks, key=lambda t: t.id):
        lat, lon = task_position(net, t)
        if hotspot.is_no_go(g.field, lat, lon, g.theta):
            deferred.append(t)
        else:
            active.append(t)
    if not active:
        raise AllTasksDeferred("every task target lies in a no-go zone")

    sites = [net.depot] + [task_vertex(net, t) for t in active]
    n = len(active)
    cost = np.full((n + 1, n + 1), np.inf)
    paths: dict[tuple[int, int], list[str]] = {}
    for i in range(n + 1):
        for j in range(n + 1):
            try:
                p, c = shortest_path(g, sites[i], sites[j])
            except Unreachable:
                continue
            cost[i, j] = c
            paths[(i, j)] = p
    for j in range(1, n + 1):
        if not np.isfinite(cost[0, j]):
            raise Unreachable(f"task {active[j - 1].id} unreachable from depot")

    orders, costs = tour_search(cost, int(k))
    routes = []
    for rank, (order, wcost) in enumerate(zip(orders, costs), start=1):
        seq = [0] + [int(x) for x in order]
        legs = []
        hours = 0.0
        max_risk = 0.0
        for u, v in zip(seq, seq[1:]):
            p = paths[(u, v)]
            h, r = _leg_metrics(g, p)
            legs.append(tuple(p))
            hours += h
            max_risk = max(max_risk, r)
        routes.append(
            CrewRoute(
                id=f"R{rank}",
                task_order=tuple(active[i - 1].id for i in seq[1:]),
                legs=tuple(legs),
                total_travel_hours=hours,
                weighted_cost=float(wcost),
                max_leg_risk=max_risk,
                deferred=tuple(t.id for t in deferred),
            )
        )
    return routes, deferred


def _apply_repairs(net: grid.Network, tasks: list[RepairTask]) -> grid.Network:
    """Post-repair network: faulted edge targets are returned to service."""
    for t in tasks:
        if t.target in net.edge_map and net.edge_map[t.target].state == "faulted":
            net = grid.set_fault(net, t.target, faulted=False)
    return net


def rank_routes(
    candidates: list[CrewRoute],
    net: grid.Network,
    tasks: list[RepairTask],
    ahp: metrics.AhpModel,
    restoration_max_actions: int = 2,
) -> list[CrewRoute]:
    """Attach indicators and composite scores; sort best-first.

    All candidates repair the same task set, so tau, C_r, CL_r and SO are
    shared; T_r separates the orders. SO and the switching share of T_r come
    from the restoration plan bundled with the repaired network.
    """
    if not candidates:
        raise ValidationError("need at least one candidate route")
    by_id = {t.id: t for t in tasks}
    repaired = _apply_repairs(net, [by_id[tid] for tid in candidates[0].task_order])
    served_before, _, _, _ = grid.critical_load_summary(net)
    served_after, _, _, _ = grid.critical_load_summary(repaired)
    tau_after = metrics.topological_coefficient(repaired)
    cl_restored = max(0, served_after - served_before)
    try:
        plan = restoration.best_restoration(repaired, ahp, max_actions=restoration_max_actions)
        so = plan.so_count
    except NoFeasiblePlan:
        so = 0

    indicator_list = []
    for route in candidates:
        repair_hours = sum(by_id[tid].repair_hours for tid in route.task_order)
        repair_cost = sum(by_id[tid].repair_cost for tid in route.task_order)
        ind = metrics.ResilienceIndicators(
            T_r=route.total_travel_hours + repair_hours,
            C_r=repair_cost,
            tau=tau_after,
            CL_r=cl_restored,
            SO=so,
        )
        route.indicators = ind
        indicator_list.append(ind)
    for route, ind in zip(candidates, indicator_list):
        route.composite = metrics.composite_score(ind, indicator_list, ahp)
    return sorted(
        candidates, key=lambda r: (-r.composite, r.indicators.T_r, r.id)
    )


def route_report(ranked: list[CrewRoute], deferred: list[RepairTask]) -> dict:
    return {
        "routes": [
            {
                "id": r.id,
                "task_order": list(r.task_order),
                "legs": [list(leg) for leg in r.legs],
                "total_travel_hours": r.total_travel_hours,
                "max_leg_risk": r.max_leg_risk,
                "indicators": r.indicators.as_dict() if r.indicators else None,
                "composite": r.composite,
                "status": r.status,
            }
            for r in ranked
        ],
        "deferred": [
            {"id": t.id, "target": t.target, "reason": "target in no-go zone"}
            for t in deferred
        ],
    }


_TRANSITIONS = {
    ("candidate", "proposed"),
    ("proposed", "signed_off"),
    ("proposed", "rejected"),
}


class RouteRegistry:
    """Holds evaluated routes and enforces the sign-off state machine."""

    def __init__(self, log=None):
        self._routes: dict[str, CrewRoute] = {}
        self._log = log or (lambda kind, payload: None)

    def register(self, routes: list[CrewRoute]) -> None:
        for r in routes:
            self._routes[r.id] = r

    def get(self, route_id: str) -> CrewRoute:
        route = self._routes.get(route_id)
        if route is None:
            raise UnknownRoute(f"no route {route_id!r}")
        return route

    def _transition(self, route_id: str, target: str, **extra) -> CrewRoute:
        route = self.get(route_id)
        if (route.status, target) not in _TRANSITIONS:
            raise InvalidTransition(f"route {route_id}: {route.status} -> {target}")
        route.status = target
        route.history.append({"status": target, **extra})
        self._log("route_" + target, {"route": route_id, **extra})
        return route

    def propose(self, route_id: str) -> CrewRoute:
        return self._transition(route_id, "proposed")

    def sign_off(self, route_id: str, operator: str) -> CrewRoute:
        return self._transition(route_id, "signed_off", operator=operator)

    def reject(self, route_id: str, operator: str) -> CrewRoute:
        return self._transition(route_id, "rejected", operator=operator)
