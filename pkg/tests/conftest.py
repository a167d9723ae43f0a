import sys
from datetime import date
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tools"))

from rtrmt import grid, hotspot, metrics, routing
from rtrmt.service import data_path


@pytest.fixture(scope="session")
def net45():
    return grid.load_network(data_path("net45.json"))


@pytest.fixture(scope="session")
def cases():
    return hotspot.ingest_cases(data_path("cases_wa.csv"))


@pytest.fixture(scope="session")
def risk_field(cases):
    return hotspot.build_risk_field(cases, date(2020, 4, 1))


@pytest.fixture(scope="session")
def ahp():
    return metrics.load_ahp_config(data_path("ahp_default.json"))


@pytest.fixture(scope="session")
def tasks8(net45):
    return routing.load_tasks(data_path("tasks8.json"), net45)


def make_node(nid, kind="bus", lat=0.0, lon=0.0, load=0.0, critical=False, cap=0.0, **kw):
    return grid.Node(
        id=nid, kind=kind, lat=lat, lon=lon, load_kw=load, critical=critical,
        capacity_kw=cap, **kw,
    )


def make_edge(eid, a, b, km=1.0, switchable=False, state="closed"):
    return grid.Edge(id=eid, src=a, dst=b, length_km=km, switchable=switchable, state=state)


@pytest.fixture
def path3():
    """Source - bus - bus chain; Laplacian eigenvalues {0, 1, 3}."""
    nodes = [
        make_node("a", kind="source", cap=100.0),
        make_node("b", lat=0.1, load=10.0),
        make_node("c", lat=0.2, load=10.0, critical=True),
    ]
    edges = [make_edge("e1", "a", "b"), make_edge("e2", "b", "c")]
    return grid.build_network(nodes, edges, depot="a")
