"""Engine host: authoritative state, tick loop, HTTP/JSON API under /v1.

One writer (the command lock) serializes every mutation; reads copy out
plain-JSON snapshots. Persistence is plain files: a scenario snapshot JSON
plus an append-only NDJSON event log.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import date, datetime
from importlib import resources
from pathlib import Path

from . import assistant, grid, hotspot, metrics, restoration, routing, telemetry
from .errors import (
    InvalidStageTransition,
    InvalidTransition,
    IoError,
    RtrmtError,
    SchemaVersionMismatch,
    UnknownAsset,
    UnknownEdge,
    UnknownNode,
    UnknownRoute,
)

SCHEMA_VERSION = 1

_parse_iso_date = date.fromisoformat


def data_path(name: str) -> Path:
    return Path(resources.files("rtrmt").joinpath("data", name))


@dataclass
class EngineConfig:
    network_path: str
    cases_path: str
    ahp_path: str
    weights_path: str | None = None
    risk_date: date | None = None
    seed: int = 0
    theta: float = hotspot.DEFAULT_NO_GO_THRESHOLD
    beta: float = routing.DEFAULT_BETA
    tick_interval_s: float = 0.0  # 0 = no background pacing; ticks on demand
    log_path: str | None = None
    static_dir: str | None = None

    @classmethod
    def defaults(cls, **overrides) -> "EngineConfig":
        base = dict(
            network_path=str(data_path("net45.json")),
            cases_path=str(data_path("cases_wa.csv")),
            ahp_path=str(data_path("ahp_default.json")),
            weights_path=str(data_path("realtime_weights.json")),
            risk_date=date(2020, 4, 1),
        )
        base.update(overrides)
        return cls(**base)


class Engine:
    """Owns the simulation state; all mutations pass through one lock."""

    def __init__(self, config: EngineConfig):
        self.config = config
        self._lock = threading.RLock()
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        self._log_fh = None

        net = grid.load_network(config.network_path)
        cases = hotspot.ingest_cases(config.cases_path)
        self.ahp = metrics.load_ahp_config(config.ahp_path)
        weights = (
            metrics.load_realtime_weights(config.weights_path)
            if config.weights_path
            else None
        )
        span = cases.date_range()
        risk_date = config.risk_date or (span[1] if span else date(2020, 1, 1))
        self.state = telemetry.new_state(
            net,
            cases,
            risk_date,
            start=datetime(2020, 4, 1, 8, 0),
            seed=config.seed,
            weights=weights,
        )
        if config.log_path:
            self._log_fh = open(config.log_path, "a", encoding="utf-8")
        self.routes = routing.RouteRegistry(log=self._log)
        self._tasks: dict[str, routing.RepairTask] = {}
        # an initial score so reads work before the first tick
        record = metrics.realtime_score(
            self.state.net, stage=self.state.stage, weights=weights,
            timestamp=self.state.clock,
        )
        self.state.scores.append(record)
        self._log("engine_started", {"network": config.network_path, "seed": config.seed})

    # -- logging ------------------------------------------------------------

    def _log(self, kind: str, payload: dict) -> None:
        self.state.append_log(kind, payload)
        if self._log_fh:
            json.dump(self.state.log[-1], self._log_fh, sort_keys=True)
            self._log_fh.write("\n")
            self._log_fh.flush()

    # -- tick loop ----------------------------------------------------------

    def tick(self) -> metrics.ScoreRecord:
        with self._lock:
            _, record = telemetry.tick(self.state)
            if self._log_fh:
                json.dump(self.state.log[-1], self._log_fh, sort_keys=True)
                self._log_fh.write("\n")
                self._log_fh.flush()
            return record

    def start(self) -> None:
        if self.config.tick_interval_s <= 0:
            return
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def _run(self) -> None:
        while not self._stop.wait(self.config.tick_interval_s):
            self.tick()

    def shutdown(self) -> None:
        self._stop.set()
        if self._thread:
            self._thread.join(timeout=5)
        self._log("shutdown", {"clean": True})
        if self._log_fh:
            self._log_fh.close()
            self._log_fh = None

    # -- reads --------------------------------------------------------------

    def snapshot_state(self) -> dict:
        with self._lock:
            net = self.state.net
            energized = grid.energization_state(net)
            return {
                "stage": self.state.stage.value,
                "depot": net.depot,
                "tick_index": self.state.tick_index,
                "clock": self.state.clock.isoformat(),
                "nodes": [
                    {
                        "id": n.id,
                        "kind": n.kind,
                        "lat": n.lat,
                        "lon": n.lon,
                        "load_kw": n.load_kw,
                        "critical": n.critical,
                        "capacity_kw": n.capacity_kw,
                        "voltage_pu": n.voltage_pu,
                        "energized": energized[n.id],
                    }
                    for n in net.nodes
                ],
                "edges": [
                    {
                        "id": e.id,
                        "from": e.src,
                        "to": e.dst,
                        "state": e.state,
                        "switchable": e.switchable,
                        "length_km": e.length_km,
                    }
                    for e in net.edges
                ],
            }

    def latest_score(self) -> dict:
        with self._lock:
            return self.state.scores[-1].as_dict()

    def score_history(self) -> list[dict]:
        with self._lock:
            return [r.as_dict() for r in self.state.scores]

    def hotspots(self, on: date | None = None) -> dict:
        with self._lock:
            field = self.state.risk
            if on is not None and on != field.date:
                field = hotspot.build_risk_field(
                    self.state.cases, on, window_days=self.state.window_days
                )
            return {
                "date": field.date.isoformat(),
                "theta": self.config.theta,
                "zones": [
                    {
                        "zone_id": z.zone_id,
                        "name": z.name,
                        "lat": z.lat,
                        "lon": z.lon,
                        "radius_km": z.radius_km,
                        "intensity": z.intensity,
                        "active_cases": z.active_cases,
                        "band": hotspot.classify_band(z.intensity),
                        "no_go": z.intensity >= self.config.theta,
                    }
                    for z in field.zones
                ],
            }

    # -- commands -----------------------------------------------------------

    def inject_event(self, kind: str, payload: dict) -> dict:
        with self._lock:
            telemetry.inject_event(self.state, kind, payload)
            if self._log_fh:
                json.dump(self.state.log[-1], self._log_fh, sort_keys=True)
                self._log_fh.write("\n")
                self._log_fh.flush()
            return {"applied": kind}

    def switch(self, edge_id: str, target: str) -> dict:
        with self._lock:
            self.state.net = grid.apply_switch_action(self.state.net, edge_id, target)
            self.state.so_count += 1
            self._log("switch", {"edge": edge_id, "state": target})
            return {"edge": edge_id, "state": target, "so_count": self.state.so_count}

    def search_routes(self, tasks_doc: list, k: int, theta: float | None, beta: float | None) -> dict:
        with self._lock:
            net = self.state.net
            tasks = []
            for obj in tasks_doc:
                task = routing.RepairTask(
                    id=str(obj["id"]),
                    target=str(obj["target"]),
                    repair_hours=float(obj["repair_hours"]),
                    repair_cost=float(obj.get("repair_cost", 0.0)),
                    requires_parts=bool(obj.get("requires_parts", False)),
                )
                if task.target not in net.node_map and task.target not in net.edge_map:
                    raise UnknownAsset(f"task {task.id}: unknown target {task.target!r}")
                tasks.append(task)
            g = routing.build_travel_graph(
                net,
                self.state.risk,
                theta=theta if theta is not None else self.config.theta,
                beta=beta if beta is not None else self.config.beta,
            )
            candidates, deferred = routing.candidate_routes(g, tasks, k=k)
            ranked = routing.rank_routes(candidates, net, tasks, self.ahp)
            self.routes.register(ranked)
            for t in tasks:
                self._tasks[t.id] = t
            self._log("routes_searched", {"k": k, "found": len(ranked)})
            return routing.route_report(ranked, deferred)

    def propose_route(self, route_id: str) -> dict:
        with self._lock:
            route = self.routes.propose(route_id)
            return {"id": route.id, "status": route.status}

    def sign_off_route(self, route_id: str, operator: str) -> dict:
        with self._lock:
            route = self.routes.sign_off(route_id, operator)
            return {"id": route.id, "status": route.status, "operator": operator}

    def search_restoration(self, max_actions: int) -> dict:
        with self._lock:
            plans = restoration.rank_plans(self.state.net, self.ahp, max_actions)
            self._log("restoration_searched", {"max_actions": max_actions, "found": len(plans)})
            return {"plans": [p.as_dict() for p in plans]}

    def query(self, text: str) -> dict:
        with self._lock:
            snap = assistant.Snapshot(
                net=self.state.net,
                risk=self.state.risk,
                latest_score=self.state.scores[-1] if self.state.scores else None,
            )
            ans = assistant.ask(text, snap)
            return {"text": ans.text, "data": ans.data}

    # -- persistence ----------------------------------------------------------

    def serializable_projection(self) -> dict:
        with self._lock:
            net_doc = {
                "nodes": [
                    {
                        "id": n.id, "kind": n.kind, "lat": n.lat, "lon": n.lon,
                        "load_kw": n.load_kw, "critical": n.critical,
                        "capacity_kw": n.capacity_kw,
                    }
                    for n in self.state.net.nodes
                ],
                "edges": [
                    {
                        "id": e.id, "from": e.src, "to": e.dst,
                        "length_km": e.length_km, "switchable": e.switchable,
                        "state": e.state, "capacity_kw": e.capacity_kw,
                    }
                    for e in self.state.net.edges
                ],
                "depot": self.state.net.depot,
                "nominal_tau": self.state.net.nominal_tau,
            }
            return {
                "schema_version": SCHEMA_VERSION,
                "network": net_doc,
                "stage": self.state.stage.value,
                "risk_date": self.state.risk.date.isoformat(),
                "seed": self.state.seed,
                "tick_index": self.state.tick_index,
                "so_count": self.state.so_count,
                "scores": [r.as_dict() for r in self.state.scores],
            }

    def persist_scenario(self, path) -> None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(self.serializable_projection(), fh, indent=2, sort_keys=True)
                fh.write("\n")
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc

    def load_scenario(self, path) -> None:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise IoError(f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise IoError(f"{path}: {exc}") from exc
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise SchemaVersionMismatch(
                f"schema_version {doc.get('schema_version')} != {SCHEMA_VERSION}"
            )
        with self._lock:
            # snapshots capture in-flight states (ties closed, faults live),
            # so rebuild directly instead of the normal-state loader
            net_doc = doc["network"]
            nodes = tuple(
                grid.Node(
                    id=n["id"], kind=n["kind"], lat=n["lat"], lon=n["lon"],
                    load_kw=n["load_kw"], critical=n["critical"],
                    capacity_kw=n["capacity_kw"],
                )
                for n in net_doc["nodes"]
            )
            edges = tuple(
                grid.Edge(
                    id=e["id"], src=e["from"], dst=e["to"], length_km=e["length_km"],
                    switchable=e["switchable"], state=e["state"],
                    capacity_kw=e["capacity_kw"],
                )
                for e in net_doc["edges"]
            )
            self.state.net = grid.Network(
                nodes=nodes, edges=edges, depot=net_doc["depot"],
                nominal_tau=float(net_doc["nominal_tau"]),
            )
            self.state.stage = grid.EventStage(doc["stage"])
            self.state.tick_index = int(doc["tick_index"])
            self.state.so_count = int(doc["so_count"])
            self.state.scores = [
                metrics.ScoreRecord(
                    timestamp=datetime.fromisoformat(r["timestamp"]),
                    score=float(r["score"]),
                    components=dict(r["components"]),
                    stage=grid.EventStage(r["stage"]),
                )
                for r in doc["scores"]
            ]
            self.state.risk = hotspot.build_risk_field(
                self.state.cases,
                date.fromisoformat(doc["risk_date"]),
                window_days=self.state.window_days,
            )


def _status_for(exc: RtrmtError) -> int:
    if isinstance(exc, (UnknownRoute, UnknownEdge, UnknownNode, UnknownAsset)):
        return 404
    if isinstance(exc, (InvalidTransition, InvalidStageTransition)):
        return 409
    return 400


def create_app(engine: Engine):
    from contextlib import asynccontextmanager

    from fastapi import FastAPI, Request
    from fastapi.responses import JSONResponse

    @asynccontextmanager
    async def _lifespan(_app):
        engine.start()
        yield
        engine.shutdown()

    app = FastAPI(title="rtrmt", version="0.1.0", lifespan=_lifespan)
    app.state.engine = engine

    @app.exception_handler(RtrmtError)
    async def _rtrmt_error(_request: Request, exc: RtrmtError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": exc.code, "message": str(exc)},
        )

    @app.get("/v1/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.get("/v1/state")
    async def get_state():
        return engine.snapshot_state()

    @app.get("/v1/resilience")
    async def get_resilience():
        return engine.latest_score()

    @app.get("/v1/resilience/history")
    async def get_history():
        return {"records": engine.score_history()}

    @app.get("/v1/hotspots")
    async def get_hotspots(date: str | None = None):
        on = None
        if date:
            try:
                on = _parse_iso_date(date)
            except ValueError as exc:
                raise RtrmtError(f"bad date {date!r}") from exc
        return engine.hotspots(on)

    @app.post("/v1/events")
    async def post_event(body: dict):
        return engine.inject_event(str(body.get("kind")), body.get("payload", {}))

    @app.post("/v1/ticks")
    async def post_ticks(body: dict | None = None):
        n = int((body or {}).get("n", 1))
        record = None
        for _ in range(max(1, n)):
            record = engine.tick()
        return record.as_dict()

    @app.post("/v1/routes/search")
    async def post_routes_search(body: dict):
        return engine.search_routes(
            body.get("tasks", []),
            k=int(body.get("k", routing.DEFAULT_K)),
            theta=body.get("theta"),
            beta=body.get("beta"),
        )

    @app.post("/v1/routes/{route_id}/propose")
    async def post_propose(route_id: str):
        return engine.propose_route(route_id)

    @app.post("/v1/routes/{route_id}/signoff")
    async def post_signoff(route_id: str, body: dict):
        operator = str(body.get("operator", "")).strip()
        if not operator:
            raise RtrmtError("operator required")
        return engine.sign_off_route(route_id, operator)

    @app.post("/v1/restoration/search")
    async def post_restoration(body: dict):
        return engine.search_restoration(int(body.get("max_actions", 2)))

    @app.post("/v1/switch")
    async def post_switch(body: dict):
        return engine.switch(str(body.get("edge")), str(body.get("state")))

    @app.post("/v1/query")
    async def post_query(body: dict):
        return engine.query(str(body.get("text", "")))

    static_dir = engine.config.static_dir
    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="console")

    return app


def serve(config: EngineConfig, host: str = "127.0.0.1", port: int = 8080):
    import uvicorn

    engine = Engine(config)
    app = create_app(engine)
    uvicorn.run(app, host=host, port=port, log_level="warning")
