"""Rule-based operator query assistant.

Every input maps to some intent; anything unrecognized falls back to a help
intent that lists the supported forms. No statistical model anywhere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import grid, hotspot, metrics
from .errors import UnknownAsset

HELP_TEXT = (
    "Supported queries:\n"
    "  what node has the lowest/highest voltage\n"
    "  what node has the lowest/highest load\n"
    "  what zone has the lowest/highest risk\n"
    "  status of <asset id>\n"
    "  how many nodes/edges/zones/critical loads/sources\n"
    "  what is the resilience score"
)


@dataclass(frozen=True)
class Intent:
    kind: str  # extremum | status | count | score | help
    metric: str | None = None  # voltage | load | risk | intensity
    direction: str | None = None  # lowest | highest
    subject: str | None = None  # asset id or asset kind


@dataclass(frozen=True)
class Answer:
    text: str
    data: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Snapshot:
    net: grid.Network
    risk: hotspot.RiskField | None = None
    latest_score: metrics.ScoreRecord | None = None


_DIRECTION = re.compile(r"\b(lowest|highest|min(?:imum)?|max(?:imum)?)\b")
_METRIC = re.compile(r"\b(voltage|load|risk|intensity|cases)\b")
_STATUS = re.compile(r"\bstatus(?:\s+of)?\s+(\S+)")
_COUNT = re.compile(r"\b(?:how\s+many|count(?:\s+of)?|number\s+of)\s+([a-z ]+)")
_SCORE = re.compile(r"\b(score|resilien\w*)\b")

_METRIC_ALIAS = {"cases": "intensity", "intensity": "intensity", "risk": "risk", "voltage": "voltage", "load": "load"}
_DIR_ALIAS = {"min": "lowest", "minimum": "lowest", "lowest": "lowest", "max": "highest", "maximum": "highest", "highest": "highest"}


def parse_query(text: str) -> Intent:
    q = text.strip().lower()
    if not q:
        return Intent(kind="help")

    m_status = _STATUS.search(q)
    if m_status:
        return Intent(kind="status", subject=m_status.group(1))

    m_dir = _DIRECTION.search(q)
    m_metric = _METRIC.search(q)
    if m_dir and m_metric:
        metric = _METRIC_ALIAS[m_metric.group(1)]
        subject = "zone" if metric in ("risk", "intensity") else "node"
        return Intent(
            kind="extremum",
            metric=metric,
            direction=_DIR_ALIAS[m_dir.group(1)],
            subject=subject,
        )

    m_count = _COUNT.search(q)
    if m_count:
        return Intent(kind="count", subject=m_count.group(1).strip())

    if _SCORE.search(q):
        return Intent(kind="score")

    return Intent(kind="help")


def _extremum_nodes(snapshot: Snapshot, metric: str, direction: str) -> Answer:
    key = (lambda n: n.voltage_pu) if metric == "voltage" else (lambda n: n.load_kw)
    nodes = sorted(snapshot.net.nodes, key=lambda n: n.id)
    best = nodes[0]
    for n in nodes[1:]:
        if (direction == "lowest" and key(n) < key(best)) or (
            direction == "highest" and key(n) > key(best)
        ):
            best = n
    value = key(best)
    unit = "p.u." if metric == "voltage" else "kW"
    return Answer(
        text=f"Node {best.id} has the {direction} {metric}: {value:.4f} {unit}",
        data={"id": best.id, "metric": metric, "value": value, "unit": unit},
    )


def _extremum_zones(snapshot: Snapshot, direction: str) -> Answer:
    if snapshot.risk is None or not snapshot.risk.zones:
        return Answer(text="No risk field loaded.", data={})
    zones = sorted(snapshot.risk.zones, key=lambda z: z.zone_id)
    best = zones[0]
    for z in zones[1:]:
        if (direction == "lowest" and z.intensity < best.intensity) or (
            direction == "highest" and z.intensity > best.intensity
        ):
            best = z
    return Answer(
        text=(
            f"Zone {best.zone_id} ({best.name}) has the {direction} risk: "
            f"{best.intensity:.2f} ({hotspot.classify_band(best.intensity)})"
        ),
        data={
            "id": best.zone_id,
            "metric": "intensity",
            "value": best.intensity,
            "band": hotspot.classify_band(best.intensity),
            "active_cases": best.active_cases,
        },
    )


def _status(snapshot: Snapshot, asset_id: str) -> Answer:
    net = snapshot.net
    node = net.node_map.get(asset_id)
    if node is not None:
        energized = grid.energization_state(net)[asset_id]
        return Answer(
            text=(
                f"Node {node.id}: kind={node.kind}, voltage={node.voltage_pu:.4f} p.u., "
                f"load={node.load_kw:g} kW, critical={node.critical}, "
                f"{'energized' if energized else 'de-energized'}"
            ),
            data={
                "id": node.id,
                "kind": node.kind,
                "voltage_pu": node.voltage_pu,
                "load_kw": node.load_kw,
                "critical": node.critical,
                "energized": energized,
            },
        )
    edge = net.edge_map.get(asset_id)
    if edge is not None:
        return Answer(
            text=(
                f"Edge {edge.id}: {edge.src} - {edge.dst}, state={edge.state}, "
                f"length={edge.length_km:g} km, switchable={edge.switchable}"
            ),
            data={
                "id": edge.id,
                "from": edge.src,
                "to": edge.dst,
                "state": edge.state,
                "length_km": edge.length_km,
                "switchable": edge.switchable,
            },
        )
    raise UnknownAsset(f"no asset {asset_id!r}")


def _count(snapshot: Snapshot, subject: str) -> Answer:
    net = snapshot.net
    word = subject.rstrip("s ")
    counts = {
        "node": len(net.nodes),
        "bus": sum(1 for n in net.nodes if n.kind == "bus"),
        "edge": len(net.edges),
        "line": len(net.edges),
        "switch": sum(1 for e in net.edges if e.switchable),
        "source": sum(1 for n in net.nodes if n.kind == "source"),
        "der": sum(1 for n in net.nodes if n.kind == "der"),
        "critical load": sum(1 for n in net.nodes if n.critical),
        "zone": len(snapshot.risk.zones) if snapshot.risk else 0,
        "fault": sum(1 for e in net.edges if e.state == "faulted"),
    }
    if word not in counts:
        return Answer(text=HELP_TEXT, data={"supported": sorted(counts)})
    return Answer(
        text=f"There are {counts[word]} {word}(s).",
        data={"subject": word, "count": counts[word]},
    )


def answer(intent: Intent, snapshot: Snapshot) -> Answer:
    if intent.kind == "extremum":
        if intent.metric in ("risk", "intensity"):
            return _extremum_zones(snapshot, intent.direction)
        return _extremum_nodes(snapshot, intent.metric, intent.direction)
    if intent.kind == "status":
        return _status(snapshot, intent.subject)
    if intent.kind == "count":
        return _count(snapshot, intent.subject)
    if intent.kind == "score":
        rec = snapshot.latest_score
        if rec is None:
            return Answer(text="No score computed yet.", data={})
        return Answer(
            text=f"Resilience score {rec.score:.3f} at {rec.timestamp.isoformat()} ({rec.stage.value})",
            data=rec.as_dict(),
        )
    return Answer(text=HELP_TEXT, data={"kind": "help"})


def ask(text: str, snapshot: Snapshot) -> Answer:
    return answer(parse_query(text), snapshot)
