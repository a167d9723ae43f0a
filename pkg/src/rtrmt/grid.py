"""Distribution-network model: loading, validation, switching, energization.

Network snapshots are immutable; every mutation returns a new snapshot.
Adequacy is modeled as island capacity vs. connected load with deterministic
shedding (non-critical first, then critical, ascending node id). There is no
power-flow computation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property

from .errors import (
    IoError,
    EdgeFaulted,
    NotSwitchable,
    ParseError,
    UnknownEdge,
    ValidationError,
)
from .spectral import algebraic_connectivity

NODE_KINDS = ("bus", "source", "der")
EDGE_STATES = ("closed", "open", "faulted")

_NODE_KEYS = {"id", "kind", "lat", "lon", "load_kw", "critical", "capacity_kw"}
_EDGE_KEYS = {"id", "from", "to", "length_km", "switchable", "state", "capacity_kw"}


class EventStage(str, Enum):
    PRE_EVENT = "pre_event"
    DURING_EVENT = "during_event"
    POST_EVENT = "post_event"

    @property
    def successor(self) -> "EventStage":
        order = [EventStage.PRE_EVENT, EventStage.DURING_EVENT, EventStage.POST_EVENT]
        return order[(order.index(self) + 1) % 3]


class ThreatClass(str, Enum):
    PHYSICAL_MANMADE = "physical_manmade"
    PHYSICAL_NATURAL = "physical_natural"
    CYBER = "cyber"
    NONPHYSICAL_NATURAL = "nonphysical_natural"


@dataclass(frozen=True)
class Node:
    id: str
    kind: str
    lat: float
    lon: float
    load_kw: float = 0.0
    critical: bool = False
    capacity_kw: float = 0.0
    voltage_pu: float = 1.0  # telemetry-carried, not persisted in the network file


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    length_km: float
    switchable: bool = False
    state: str = "closed"
    capacity_kw: float = 1e9


@dataclass(frozen=True)
class Network:
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    depot: str
    nominal_tau: float

    @cached_property
    def node_map(self) -> dict[str, Node]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    def with_edge_state(self, edge_id: str, state: str) -> "Network":
        edges = tuple(replace(e, state=state) if e.id == edge_id else e for e in self.edges)
        return replace(self, edges=edges)

    def with_node(self, node: Node) -> "Network":
        nodes = tuple(node if n.id == node.id else n for n in self.nodes)
        return replace(self, nodes=nodes)


def _require(obj: dict, allowed: set, what: str, index: int):
    keys = set(obj)
    unknown = keys - allowed
    if unknown:
        raise ParseError(f"{what}[{index}]: unknown keys {sorted(unknown)}")
    missing = allowed - keys
    if missing:
        raise ParseError(f"{what}[{index}]: missing keys {sorted(missing)}")


def _parse_node(obj: dict, index: int) -> Node:
    _require(obj, _NODE_KEYS, "nodes", index)
    if obj["kind"] not in NODE_KINDS:
        raise ParseError(f"nodes[{index}]: bad kind {obj['kind']!r}")
    try:
        node = Node(
            id=str(obj["id"]),
            kind=obj["kind"],
            lat=float(obj["lat"]),
            lon=float(obj["lon"]),
            load_kw=float(obj["load_kw"]),
            critical=bool(obj["critical"]),
            capacity_kw=float(obj["capacity_kw"]),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"nodes[{index}]: {exc}") from exc
    if node.load_kw < 0 or node.capacity_kw < 0:
        raise ValidationError(f"node {node.id}: negative load or capacity")
    if node.kind == "source" and node.load_kw != 0:
        raise ValidationError(f"node {node.id}: sources carry no load")
    if node.kind == "bus" and node.capacity_kw != 0:
        raise ValidationError(f"node {node.id}: buses have no capacity")
    return node


def _parse_edge(obj: dict, index: int) -> Edge:
    _require(obj, _EDGE_KEYS, "edges", index)
    if obj["state"] not in EDGE_STATES:
        raise ParseError(f"edges[{index}]: bad state {obj['state']!r}")
    try:
        edge = Edge(
            id=str(obj["id"]),
            src=str(obj["from"]),
            dst=str(obj["to"]),
            length_km=float(obj["length_km"]),
            switchable=bool(obj["switchable"]),
            state=obj["state"],
            capacity_kw=float(obj["capacity_kw"]),
        )
    except (TypeError, ValueError) as exc:
        raise ParseError(f"edges[{index}]: {exc}") from exc
    if edge.length_km <= 0:
        raise ValidationError(f"edge {edge.id}: length_km must be positive")
    if edge.capacity_kw <= 0:
        raise ValidationError(f"edge {edge.id}: capacity_kw must be positive")
    if edge.state == "open" and not edge.switchable:
        raise ValidationError(f"edge {edge.id}: non-switchable edge cannot be open")
    return edge


def _validate_topology(nodes: tuple[Node, ...], edges: tuple[Edge, ...], depot: str):
    ids = [n.id for n in nodes]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise ValidationError(f"duplicate node ids {dupes}")
    eids = [e.id for e in edges]
    if len(set(eids)) != len(eids):
        dupes = sorted({i for i in eids if eids.count(i) > 1})
        raise ValidationError(f"duplicate edge ids {dupes}")
    known = set(ids)
    for e in edges:
        if e.src not in known or e.dst not in known:
            raise ValidationError(f"edge {e.id}: dangling endpoint")
    if depot not in known:
        raise ValidationError(f"depot {depot!r} is not a node")


def load_network(path) -> Network:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    unknown = set(doc) - {"nodes", "edges", "depot"}
    if unknown:
        raise ParseError(f"unknown top-level keys {sorted(unknown)}")
    for key in ("nodes", "edges", "depot"):
        if key not in doc:
            raise ParseError(f"missing top-level key {key!r}")
    nodes = tuple(_parse_node(o, i) for i, o in enumerate(doc["nodes"]))
    edges = tuple(_parse_edge(o, i) for i, o in enumerate(doc["edges"]))
    return build_network(nodes, edges, str(doc["depot"]))


def build_network(nodes, edges, depot: str) -> Network:
    """Validate parts and assemble a Network with its as-designed tau cached."""
    nodes, edges = tuple(nodes), tuple(edges)
    _validate_topology(nodes, edges, depot)
    net = Network(nodes=nodes, edges=edges, depot=depot, nominal_tau=0.0)
    if not is_radial(net):
        raise ValidationError("normal-state energized topology is not radial")
    tau = algebraic_connectivity(len(nodes), _edge_index_pairs(net))
    return replace(net, nominal_tau=tau)


def save_network(net: Network, path) -> None:
    doc = {
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind,
                "lat": n.lat,
                "lon": n.lon,
                "load_kw": n.load_kw,
                "critical": n.critical,
                "capacity_kw": n.capacity_kw,
            }
            for n in net.nodes
        ],
        "edges": [
            {
                "id": e.id,
                "from": e.src,
                "to": e.dst,
                "length_km": e.length_km,
                "switchable": e.switchable,
                "state": e.state,
                "capacity_kw": e.capacity_kw,
            }
            for e in net.edges
        ],
        "depot": net.depot,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _edge_index_pairs(net: Network):
    """Index pairs of closed, non-faulted edges over all nodes."""
    index = {n.id: i for i, n in enumerate(net.nodes)}
    return [(index[e.src], index[e.dst]) for e in net.edges if e.state == "closed"]


def live_components(net: Network) -> list[set[str]]:
    """Connected components over closed, non-faulted edges."""
    parent = {n.id: n.id for n in net.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in net.edges:
        if e.state == "closed":
            ra, rb = find(e.src), find(e.dst)
            if ra != rb:
                parent[ra] = rb
    groups: dict[str, set[str]] = {}
    for n in net.nodes:
        groups.setdefault(find(n.id), set()).add(n.id)
    return list(groups.values())


def _island_capacity(net: Network, island: set[str]) -> float:
    return sum(
        net.node_map[i].capacity_kw
        for i in island
        if net.node_map[i].kind in ("source", "der")
    )


def energization_state(net: Network) -> dict[str, bool]:
    """Per-node served/energized flag after deterministic load shedding.

    A node is energized iff it sits in an island powered by a source/DER with
    positive capacity and its load survives the shedding pass (non-critical
    loads shed first, then critical, both by ascending node id).
    """
    state = {n.id: False for n in net.nodes}
    for island in live_components(net):
        capacity = _island_capacity(net, island)
        if capacity <= 0:
            continue
        members = sorted(island)
        served = {i: True for i in members}
        total = sum(net.node_map[i].load_kw for i in members)
        shed_order = [i for i in members if not net.node_map[i].critical] + [
            i for i in members if net.node_map[i].critical
        ]
        for i in shed_order:
            if total <= capacity:
                break
            if net.node_map[i].load_kw > 0:
                served[i] = False
                total -= net.node_map[i].load_kw
        for i in members:
            state[i] = served[i]
    return state


def is_radial(net: Network) -> bool:
    """True iff no powered island contains a cycle of closed edges."""
    comps = live_components(net)
    comp_of = {}
    for idx, island in enumerate(comps):
        for i in island:
            comp_of[i] = idx
    edge_count = [0] * len(comps)
    for e in net.edges:
        if e.state == "closed":
            edge_count[comp_of[e.src]] += 1
    for idx, island in enumerate(comps):
        if _island_capacity(net, island) > 0 and edge_count[idx] >= len(island):
            return False
    return True


def apply_switch_action(net: Network, edge_id: str, target: str) -> Network:
    if target not in ("open", "closed"):
        raise ValidationError(f"bad switch target {target!r}")
    edge = net.edge_map.get(edge_id)
    if edge is None:
        raise UnknownEdge(f"no edge {edge_id!r}")
    if edge.state == "faulted":
        raise EdgeFaulted(f"edge {edge_id} is faulted")
    if not edge.switchable:
        raise NotSwitchable(f"edge {edge_id} is not switchable")
    return net.with_edge_state(edge_id, target)


def set_fault(net: Network, edge_id: str, faulted: bool = True) -> Network:
    """Telemetry-side fault injection/clearing; clearing restores 'closed'."""
    if edge_id not in net.edge_map:
        raise UnknownEdge(f"no edge {edge_id!r}")
    return net.with_edge_state(edge_id, "faulted" if faulted else "closed")


def critical_load_summary(net: Network) -> tuple[int, int, float, float]:
    """(served_critical, total_critical, served_kw, total_kw) over critical loads."""
    energized = energization_state(net)
    served = total = 0
    served_kw = total_kw = 0.0
    for n in net.nodes:
        if not n.critical:
            continue
        total += 1
        total_kw += n.load_kw
        if energized[n.id]:
            served += 1
            served_kw += n.load_kw
    return served, total, served_kw, total_kw


def load_summary(net: Network) -> dict[str, float]:
    """Aggregate served/total load and spare capacity across powered islands."""
    energized = energization_state(net)
    served_kw = sum(n.load_kw for n in net.nodes if energized[n.id])
    total_kw = sum(n.load_kw for n in net.nodes)
    spare_kw = 0.0
    for island in live_components(net):
        cap = _island_capacity(net, island)
        if cap <= 0:
            continue
        isl_served = sum(
            net.node_map[i].load_kw for i in island if energized[i]
        )
        spare_kw += max(0.0, cap - isl_served)
    return {"served_kw": served_kw, "total_kw": total_kw, "spare_kw": spare_kw}
