"""Simulated clock: 15-minute score ticks, scripted events, seeded telemetry.

The clock is purely simulated; real-time pacing is a presentation concern
(the service sleeps between ticks, outputs are unaffected). Voltage noise is
cosmetic telemetry for the query assistant and never feeds the score, which
keeps replay output reproducible bit-for-bit under a fixed seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta

import numpy as np

from . import grid, hotspot, metrics
from .errors import InvalidStageTransition, IoError, ParseError, UnknownEdge, ValidationError

TICK_MINUTES = 15
VOLTAGE_NOISE = 0.02

EVENT_KINDS = ("fault_edge", "clear_fault", "hotspot_update", "stage_change", "load_scale")


@dataclass(frozen=True)
class ScriptEvent:
    at_minutes: int
    kind: str
    payload: dict


@dataclass(frozen=True)
class ScenarioScript:
    name: str
    start: datetime
    duration_hours: float
    events: tuple[ScriptEvent, ...]
    network_path: str | None = None
    cases_path: str | None = None
    risk_date: date | None = None


@dataclass
class TelemetryFrame:
    timestamp: datetime
    voltage_pu: dict[str, float]
    served_kw: dict[str, float]
    edge_state: dict[str, str]

    def as_dict(self) -> dict:
        return {
            "timestamp": self.timestamp.isoformat(),
            "voltage_pu": self.voltage_pu,
            "served_kw": self.served_kw,
            "edge_state": self.edge_state,
        }


@dataclass
class SimState:
    net: grid.Network
    cases: hotspot.CaseSeries
    risk: hotspot.RiskField
    stage: grid.EventStage
    start: datetime
    seed: int
    rng: np.random.Generator
    tick_index: int = 0
    so_count: int = 0
    window_days: int = hotspot.DEFAULT_WINDOW_DAYS
    scores: list[metrics.ScoreRecord] = field(default_factory=list)
    log: list[dict] = field(default_factory=list)
    weights: dict[str, float] | None = None

    @property
    def clock(self) -> datetime:
        return self.start + timedelta(minutes=TICK_MINUTES * self.tick_index)

    def append_log(self, kind: str, payload: dict) -> None:
        self.log.append({"ts": self.clock.isoformat(), "kind": kind, "payload": payload})


def load_script(path) -> ScenarioScript:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    try:
        events = []
        last = -1
        for i, ev in enumerate(doc.get("events", [])):
            if ev["kind"] not in EVENT_KINDS:
                raise ParseError(f"events[{i}]: unknown kind {ev['kind']!r}")
            at = int(ev["at"])
            if at < last:
                raise ParseError(f"events[{i}]: offsets must be non-decreasing")
            last = at
            events.append(ScriptEvent(at_minutes=at, kind=ev["kind"], payload=ev.get("payload", {})))
        return ScenarioScript(
            name=str(doc["name"]),
            start=datetime.fromisoformat(doc["start"]),
            duration_hours=float(doc["duration_hours"]),
            events=tuple(events),
            network_path=doc.get("network"),
            cases_path=doc.get("cases"),
            risk_date=date.fromisoformat(doc["risk_date"]) if "risk_date" in doc else None,
        )
    except KeyError as exc:
        raise ParseError(f"{path}: missing key {exc}") from exc


def new_state(
    net: grid.Network,
    cases: hotspot.CaseSeries,
    risk_date: date,
    start: datetime,
    seed: int = 0,
    weights: dict[str, float] | None = None,
    window_days: int = hotspot.DEFAULT_WINDOW_DAYS,
) -> SimState:
    risk = hotspot.build_risk_field(cases, risk_date, window_days=window_days)
    return SimState(
        net=net,
        cases=cases,
        risk=risk,
        stage=grid.EventStage.PRE_EVENT,
        start=start,
        seed=seed,
        rng=np.random.default_rng(seed),
        window_days=window_days,
        weights=weights,
    )


def inject_event(state: SimState, kind: str, payload: dict) -> SimState:
    if kind == "fault_edge":
        edge = payload["edge"]
        if edge not in state.net.edge_map:
            raise UnknownEdge(f"no edge {edge!r}")
        state.net = grid.set_fault(state.net, edge, faulted=True)
    elif kind == "clear_fault":
        edge = payload["edge"]
        if edge not in state.net.edge_map:
            raise UnknownEdge(f"no edge {edge!r}")
        state.net = grid.set_fault(state.net, edge, faulted=False)
    elif kind == "stage_change":
        target = grid.EventStage(payload["stage"])
        if target != state.stage.successor:
            raise InvalidStageTransition(f"{state.stage.value} -> {target.value}")
        state.stage = target
    elif kind == "load_scale":
        factor = float(payload["factor"])
        if factor < 0:
            raise ValidationError("load_scale factor must be nonnegative")
        for n in state.net.nodes:
            if n.load_kw > 0:
                state.net = state.net.with_node(replace(n, load_kw=n.load_kw * factor))
    elif kind == "hotspot_update":
        if "rows" in payload:
            extra = hotspot.CaseSeries(
                records=tuple(
                    hotspot.CaseRecord(
                        region_id=r["region_id"],
                        name=r["name"],
                        lat=float(r["lat"]),
                        lon=float(r["lon"]),
                        date=date.fromisoformat(r["date"]),
                        cumulative_cases=int(r["cumulative_cases"]),
                    )
                    for r in payload["rows"]
                )
            )
            state.cases = hotspot.merge_cases(state.cases, extra)
        on = date.fromisoformat(payload["date"]) if "date" in payload else state.risk.date
        state.risk = hotspot.build_risk_field(state.cases, on, window_days=state.window_days)
    else:
        raise ValidationError(f"unknown event kind {kind!r}")
    state.append_log(kind, payload)
    return state


def tick(state: SimState, script: ScenarioScript | None = None) -> tuple[TelemetryFrame, metrics.ScoreRecord]:
    """Advance one 15-minute step: apply due events, perturb telemetry, score."""
    prev_minutes = TICK_MINUTES * state.tick_index
    state.tick_index += 1
    now_minutes = TICK_MINUTES * state.tick_index
    if script is not None:
        for ev in script.events:
            if prev_minutes < ev.at_minutes <= now_minutes:
                inject_event(state, ev.kind, ev.payload)

    noise = state.rng.uniform(-VOLTAGE_NOISE, VOLTAGE_NOISE, size=len(state.net.nodes))
    nodes = tuple(
        replace(n, voltage_pu=1.0 + float(dz))
        for n, dz in zip(state.net.nodes, noise)
    )
    state.net = grid.Network(
        nodes=nodes, edges=state.net.edges, depot=state.net.depot, nominal_tau=state.net.nominal_tau
    )

    energized = grid.energization_state(state.net)
    record = metrics.realtime_score(
        state.net, stage=state.stage, weights=state.weights, timestamp=state.clock
    )
    state.scores.append(record)
    frame = TelemetryFrame(
        timestamp=state.clock,
        voltage_pu={n.id: round(n.voltage_pu, 6) for n in state.net.nodes},
        served_kw={n.id: (n.load_kw if energized[n.id] else 0.0) for n in state.net.nodes},
        edge_state={e.id: e.state for e in state.net.edges},
    )
    state.append_log("score", {"score": round(record.score, 12), "stage": record.stage.value})
    return frame, record


def replay(
    script: ScenarioScript,
    net: grid.Network,
    cases: hotspot.CaseSeries,
    seed: int = 0,
    risk_date: date | None = None,
    weights: dict[str, float] | None = None,
) -> SimState:
    """Run the whole script deterministically; identical seeds give identical logs."""
    on = risk_date or script.risk_date
    if on is None:
        span = cases.date_range()
        on = span[1] if span else date(2020, 1, 1)
    state = new_state(net, cases, on, start=script.start, seed=seed, weights=weights)
    state.append_log("scenario_loaded", {"name": script.name, "seed": seed})
    ticks = int(script.duration_hours * 60 // TICK_MINUTES)
    for _ in range(ticks):
        tick(state, script)
    return state


def log_lines(state: SimState) -> str:
    return "".join(json.dumps(entry, sort_keys=True) + "\n" for entry in state.log)
