"""Resilience indicators, AHP weighting, and the real-time composite score.

The indicator vector per candidate plan is [T_r, C_r, tau, CL_r, SO]:
total repair time (h), repair cost, topological coefficient (algebraic
connectivity of the live topology), critical loads restored, and switching
operations. T_r, C_r and SO are cost-type; tau and CL_r are benefit-type.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from . import grid
from .errors import (
    ConfigError,
    EmptyCandidateSet,
    InconsistentJudgments,
    NoConvergence,
    NonPositiveEntry,
    NotReciprocal,
)
from .spectral import algebraic_connectivity

CRITERIA = ("T_r", "C_r", "tau", "CL_r", "SO")
# benefit-type criteria score higher-is-better; the rest are cost-type
BENEFIT = {"tau", "CL_r"}

# Saaty random consistency indices by matrix order
RANDOM_INDEX = {1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45, 10: 1.49}

CONSISTENCY_LIMIT = 0.10

DEFAULT_REALTIME_WEIGHTS = {"w_cl": 0.4, "w_ld": 0.2, "w_rsv": 0.2, "w_tau": 0.2}


@dataclass(frozen=True)
class ResilienceIndicators:
    T_r: float
    C_r: float
    tau: float
    CL_r: int
    SO: int

    def as_vector(self) -> np.ndarray:
        return np.array([self.T_r, self.C_r, self.tau, self.CL_r, self.SO], dtype=float)

    def as_dict(self) -> dict:
        return {"T_r": self.T_r, "C_r": self.C_r, "tau": self.tau, "CL_r": self.CL_r, "SO": self.SO}


@dataclass(frozen=True)
class AhpModel:
    pairwise: tuple[tuple[float, ...], ...]
    weights: tuple[float, ...]
    lambda_max: float
    consistency_ratio: float
    criteria: tuple[str, ...] = CRITERIA


@dataclass(frozen=True)
class ScoreRecord:
    timestamp: datetime
    score: float
    components: dict[str, float] = field(compare=False)
    stage: grid.EventStage = grid.EventStage.PRE_EVENT

    def as_dict(self) -> dict:
        return {
            "timestamp": self.timestamp.isoformat(),
            "score": self.score,
            "components": self.components,
            "stage": self.stage.value,
        }


def topological_coefficient(net: grid.Network) -> float:
    """Algebraic connectivity of the closed, non-faulted topology."""
    index = {n.id: i for i, n in enumerate(net.nodes)}
    pairs = [(index[e.src], index[e.dst]) for e in net.edges if e.state == "closed"]
    return algebraic_connectivity(len(net.nodes), pairs)


def _energized_tau(net: grid.Network) -> float:
    """Algebraic connectivity of the subgraph induced by energized nodes.

    De-energized nodes are dropped rather than kept as isolated vertices, so
    a fully served network matches the as-designed tau and a dead network
    scores zero.
    """
    energized = grid.energization_state(net)
    live = [n.id for n in net.nodes if energized[n.id]]
    if len(live) < 2:
        return 0.0
    index = {nid: i for i, nid in enumerate(live)}
    pairs = [
        (index[e.src], index[e.dst])
        for e in net.edges
        if e.state == "closed" and e.src in index and e.dst in index
    ]
    return algebraic_connectivity(len(live), pairs)


def ahp_weights(pairwise) -> tuple[np.ndarray, float, float]:
    """Principal-eigenvector weights, lambda_max, and consistency ratio.

    Power iteration to 1e-10 relative change, capped at 10000 iterations.
    """
    a = np.asarray(pairwise, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotReciprocal("pairwise matrix must be square")
    n = a.shape[0]
    if np.any(a <= 0):
        raise NonPositiveEntry("pairwise entries must be positive")
    if not np.allclose(a * a.T, 1.0, atol=1e-12):
        raise NotReciprocal("pairwise[i][j] * pairwise[j][i] must equal 1")
    w = np.full(n, 1.0 / n)
    for _ in range(10000):
        nxt = a @ w
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - w) / np.maximum(np.abs(w), 1e-300)) < 1e-10:
            w = nxt
            break
        w = nxt
    else:
        raise NoConvergence("power iteration did not converge")
    lambda_max = float((a @ w / w).mean())
    if n <= 2:
        cr = 0.0
    else:
        ci = (lambda_max - n) / (n - 1)
        cr = ci / RANDOM_INDEX[n]
        cr = 0.0 if abs(cr) < 1e-12 else cr
    return w, lambda_max, cr


def build_ahp_model(pairwise, policy: str = "error") -> AhpModel:
    w, lam, cr = ahp_weights(pairwise)
    if cr > CONSISTENCY_LIMIT:
        msg = f"consistency ratio {cr:.3f} exceeds {CONSISTENCY_LIMIT}"
        if policy == "error":
            raise InconsistentJudgments(msg)
        import warnings

        warnings.warn(msg, stacklevel=2)
    a = np.asarray(pairwise, dtype=float)
    return AhpModel(
        pairwise=tuple(tuple(row) for row in a),
        weights=tuple(float(x) for x in w),
        lambda_max=lam,
        consistency_ratio=cr,
    )


def load_ahp_config(path) -> AhpModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load AHP config {path}: {exc}") from exc
    if tuple(doc.get("criteria", ())) != CRITERIA:
        raise ConfigError(f"AHP criteria must be {list(CRITERIA)}")
    policy = doc.get("policy", "error")
    if policy not in ("error", "warn"):
        raise ConfigError(f"bad policy {policy!r}")
    return build_ahp_model(doc["pairwise"], policy=policy)


def normalize_indicators(candidates: list[ResilienceIndicators]) -> np.ndarray:
    """Min-max normalize each criterion across the candidate set.

    Benefit-type criteria map max to 1; cost-type map min to 1. A criterion
    constant across candidates normalizes to 1.0 for everyone.
    """
    if not candidates:
        raise EmptyCandidateSet("need at least one candidate")
    raw = np.vstack([c.as_vector() for c in candidates])
    out = np.ones_like(raw)
    for j, name in enumerate(CRITERIA):
        lo, hi = raw[:, j].min(), raw[:, j].max()
        if hi == lo:
            continue
        if name in BENEFIT:
            out[:, j] = (raw[:, j] - lo) / (hi - lo)
        else:
            out[:, j] = (hi - raw[:, j]) / (hi - lo)
    return out


def composite_score(
    indicators: ResilienceIndicators,
    candidates: list[ResilienceIndicators],
    model: AhpModel,
) -> float:
    normalized = normalize_indicators(candidates)
    idx = candidates.index(indicators)
    return float(np.dot(np.asarray(model.weights), normalized[idx]))


def load_realtime_weights(path) -> dict[str, float]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load weight config {path}: {exc}") from exc
    keys = set(DEFAULT_REALTIME_WEIGHTS)
    if set(doc) != keys:
        raise ConfigError(f"weight config must have keys {sorted(keys)}")
    total = sum(float(doc[k]) for k in keys)
    if abs(total - 1.0) > 1e-9:
        raise ConfigError(f"weights sum to {total}, expected 1")
    return {k: float(doc[k]) for k in keys}


def realtime_score(
    net: grid.Network,
    stage: grid.EventStage = grid.EventStage.PRE_EVENT,
    weights: dict[str, float] | None = None,
    timestamp: datetime | None = None,
) -> ScoreRecord:
    """Operational score: weighted critical/total service, reserve, and tau ratio.

    Each component lies in [0,1]; an empty denominator (no critical load, no
    load, zero nominal tau) contributes its full weight.
    """
    w = weights or DEFAULT_REALTIME_WEIGHTS
    _, _, crit_served_kw, crit_total_kw = grid.critical_load_summary(net)
    loads = grid.load_summary(net)
    tau = _energized_tau(net)

    cl = crit_served_kw / crit_total_kw if crit_total_kw > 0 else 1.0
    ld = loads["served_kw"] / loads["total_kw"] if loads["total_kw"] > 0 else 1.0
    rsv = min(1.0, loads["spare_kw"] / loads["total_kw"]) if loads["total_kw"] > 0 else 1.0
    tau_ratio = min(1.0, tau / net.nominal_tau) if net.nominal_tau > 0 else 1.0

    components = {"critical_served": cl, "load_served": ld, "reserve_margin": rsv, "tau_ratio": tau_ratio}
    score = (
        w["w_cl"] * cl + w["w_ld"] * ld + w["w_rsv"] * rsv + w["w_tau"] * tau_ratio
    )
    return ScoreRecord(
        timestamp=timestamp or datetime(2020, 1, 1),
        score=score,
        components=components,
        stage=stage,
    )
