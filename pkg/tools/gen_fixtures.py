"""Synthesize the shipped fixtures (45-node network, cases, tasks, scenario).

The 45-node network is a fixture decision: radial with one substation source,
3 DERs, 8 critical loads, 4 normally-open tie switches, laid out over central
Washington. Run from the repo root: python3 tools/gen_fixtures.py
"""

import json
import sys
from datetime import date, timedelta
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "rtrmt" / "data"
sys.path.insert(0, str(ROOT / "src"))

from rtrmt.hotspot import haversine_km  # noqa: E402

ROAD_FACTOR = 1.2


def build_net45():
    nodes = {}

    def add(nid, lat, lon, kind="bus", load=0.0, critical=False, cap=0.0):
        nodes[nid] = dict(
            id=nid, kind=kind, lat=round(lat, 4), lon=round(lon, 4),
            load_kw=load, critical=critical, capacity_kw=cap,
        )

    add("n01", 47.00, -120.50, kind="source")
    # feeder A: north-east
    for i in range(1, 12):
        add(f"n{i + 1:02d}", 47.00 + 0.055 * i, -120.50 + 0.035 * i)
    # feeder B: east
    for i in range(1, 13):
        add(f"n{i + 12:02d}", 47.00 + 0.008 * i, -120.50 + 0.10 * i)
    # feeder C: south-east
    for i in range(1, 13):
        add(f"n{i + 24:02d}", 47.00 - 0.05 * i, -120.50 + 0.04 * i)
    # spurs
    spur_parents = ["n05", "n08", "n16", "n20", "n28", "n31", "n34", "n11", "n22"]
    for j, parent in enumerate(spur_parents):
        p = nodes[parent]
        add(f"n{37 + j:02d}", p["lat"] + 0.03, p["lon"] - 0.02)

    assert len(nodes) == 45

    # loads on buses; 8 critical loads
    critical_ids = {"n05", "n09", "n18", "n22", "n27", "n33", "n38", "n43"}
    ders = {"n10", "n29", "n40"}
    for nid, n in nodes.items():
        idx = int(nid[1:])
        if n["kind"] == "source":
            continue
        if nid in ders:
            n["kind"] = "der"
            continue
        if nid in critical_ids:
            n["load_kw"] = float(90 + ((idx * 13) % 5) * 10)
            n["critical"] = True
        else:
            n["load_kw"] = float(40 + ((idx * 17) % 9) * 10)

    total_load = sum(n["load_kw"] for n in nodes.values())
    # capacity 1.5x load => reserve component 0.5, nominal score 0.9
    nodes["n01"]["capacity_kw"] = round(0.9 * total_load, 1)
    for d in sorted(ders):
        nodes[d]["capacity_kw"] = round(0.2 * total_load, 1)

    edges = []

    def link(eid, a, b, switchable=False, state="closed"):
        la, lb = nodes[a], nodes[b]
        km = haversine_km(la["lat"], la["lon"], lb["lat"], lb["lon"]) * ROAD_FACTOR
        edges.append(dict(
            id=eid, **{"from": a, "to": b}, length_km=round(max(km, 0.3), 3),
            switchable=switchable, state=state, capacity_kw=5000.0,
        ))

    # feeder A chain
    chain_a = ["n01"] + [f"n{i:02d}" for i in range(2, 13)]
    for i, (a, b) in enumerate(zip(chain_a, chain_a[1:]), start=1):
        link(f"eA{i:02d}", a, b, switchable=(i in (1, 6)))
    # feeder B chain
    chain_b = ["n01"] + [f"n{i:02d}" for i in range(13, 25)]
    for i, (a, b) in enumerate(zip(chain_b, chain_b[1:]), start=1):
        link(f"eB{i:02d}", a, b, switchable=(i in (1, 6)))
    # feeder C chain
    chain_c = ["n01"] + [f"n{i:02d}" for i in range(25, 37)]
    for i, (a, b) in enumerate(zip(chain_c, chain_c[1:]), start=1):
        link(f"eC{i:02d}", a, b, switchable=(i in (1, 6)))
    # spurs
    for j, parent in enumerate(spur_parents, start=1):
        link(f"eS{j:02d}", parent, f"n{36 + j:02d}")
    # normally-open tie switches
    link("t1", "n12", "n24", switchable=True, state="open")
    link("t2", "n24", "n36", switchable=True, state="open")
    link("t3", "n06", "n18", switchable=True, state="open")
    link("t4", "n30", "n43", switchable=True, state="open")

    assert len(edges) == 48
    return {"nodes": list(nodes.values()), "edges": edges, "depot": "n01"}, total_load


def build_cases():
    """Five county-scale regions; Z1 is the hotspot over feeder B's middle."""
    regions = [
        ("Z1", "Riverton", 47.04, -119.90, 400),
        ("Z2", "Northgate", 47.50, -120.20, 40),
        ("Z3", "Southfork", 46.60, -120.10, 160),
        ("Z4", "Westplain", 47.05, -120.95, 80),
        ("Z5", "Dryridge", 46.55, -120.85, 0),
    ]
    start = date(2020, 3, 1)
    rows = []
    for rid, name, lat, lon, active in regions:
        cum = 5 if active > 0 else 0
        for d in range(0, 46, 5):
            day = start + timedelta(days=d)
            # ramp so that cum(2020-04-01) - cum(2020-03-18) == active
            if date(2020, 3, 18) < day <= date(2020, 4, 1):
                cum += active // 3 + (active % 3 if day == date(2020, 4, 1) else 0)
            elif day > date(2020, 4, 1):
                cum += active // 6
            rows.append([rid, name, lat, lon, day.isoformat(), cum])
    rows.sort(key=lambda r: (r[0], r[4]))
    return rows


TASKS = [
    {"id": "T1", "target": "n07", "repair_hours": 2.0, "repair_cost": 1200.0, "requires_parts": False},
    {"id": "T2", "target": "n10", "repair_hours": 1.5, "repair_cost": 800.0, "requires_parts": True},
    {"id": "T3", "target": "n38", "repair_hours": 3.0, "repair_cost": 2500.0, "requires_parts": True},
    {"id": "T4", "target": "n22", "repair_hours": 1.0, "repair_cost": 600.0, "requires_parts": False},
    {"id": "T5", "target": "n24", "repair_hours": 2.5, "repair_cost": 1800.0, "requires_parts": False},
    {"id": "T6", "target": "n31", "repair_hours": 1.0, "repair_cost": 500.0, "requires_parts": False},
    {"id": "T7", "target": "n34", "repair_hours": 2.0, "repair_cost": 1500.0, "requires_parts": True},
    {"id": "T8", "target": "n43", "repair_hours": 1.5, "repair_cost": 900.0, "requires_parts": False},
]

SCENARIO = {
    "name": "covid-outage",
    "start": "2020-04-01T08:00:00",
    "duration_hours": 2.0,
    "network": None,  # packaged net45 by default
    "cases": None,
    "risk_date": "2020-04-01",
    "events": [
        {"at": 15, "kind": "stage_change", "payload": {"stage": "during_event"}},
        {"at": 30, "kind": "fault_edge", "payload": {"edge": "eB03"}},
        {"at": 60, "kind": "stage_change", "payload": {"stage": "post_event"}},
        {"at": 75, "kind": "clear_fault", "payload": {"edge": "eB03"}},
    ],
}

AHP_DEFAULT = {
    "criteria": ["T_r", "C_r", "tau", "CL_r", "SO"],
    "pairwise": [
        [1.0, 5.0, 3.0, 1 / 3, 3.0],
        [1 / 5, 1.0, 1 / 3, 1 / 7, 1 / 3],
        [1 / 3, 3.0, 1.0, 1 / 5, 3.0],
        [3.0, 7.0, 5.0, 1.0, 5.0],
        [1 / 3, 3.0, 1 / 3, 1 / 5, 1.0],
    ],
    "policy": "error",
}

REALTIME_WEIGHTS = {"w_cl": 0.4, "w_ld": 0.2, "w_rsv": 0.2, "w_tau": 0.2}


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    doc, total_load = build_net45()
    (DATA / "net45.json").write_text(json.dumps(doc, indent=2) + "\n")
    rows = build_cases()
    lines = ["region_id,name,lat,lon,date,cumulative_cases"]
    lines += [",".join(str(x) for x in r) for r in rows]
    (DATA / "cases_wa.csv").write_text("\n".join(lines) + "\n")
    (DATA / "tasks8.json").write_text(json.dumps(TASKS, indent=2) + "\n")
    (DATA / "scenario_covid_outage.json").write_text(json.dumps(SCENARIO, indent=2) + "\n")
    (DATA / "ahp_default.json").write_text(json.dumps(AHP_DEFAULT, indent=2) + "\n")
    (DATA / "realtime_weights.json").write_text(json.dumps(REALTIME_WEIGHTS, indent=2) + "\n")
    print(f"total load {total_load:.0f} kW; fixtures written to {DATA}")

    # --- diagnostics ---
    from rtrmt import grid, hotspot, metrics, routing

    net = grid.load_network(DATA / "net45.json")
    cases = hotspot.ingest_cases(DATA / "cases_wa.csv")
    field = hotspot.build_risk_field(cases, date(2020, 4, 1))
    print("zone intensities:", {z.zone_id: round(z.intensity, 3) for z in field.zones})
    rec = metrics.realtime_score(net)
    print("nominal score:", round(rec.score, 4), rec.components)
    g = routing.build_travel_graph(net, field)
    blocked = sorted({a.src + "-" + a.dst for a in g.arcs if a.blocked})
    print(f"blocked arcs ({len(blocked) // 2}):", blocked[::2])
    tasks = routing.load_tasks(DATA / "tasks8.json", net)
    routes, deferred = routing.candidate_routes(g, tasks, k=3)
    print("deferred:", [t.id for t in deferred])
    ahp = metrics.load_ahp_config(DATA / "ahp_default.json")
    print("AHP weights:", [round(w, 4) for w in ahp.weights], "CR:", round(ahp.consistency_ratio, 4))
    ranked = routing.rank_routes(routes, net, tasks, ahp)
    for r in ranked:
        print(r.id, r.task_order, round(r.total_travel_hours, 2), "composite:", round(r.composite, 4))


if __name__ == "__main__":
    main()
