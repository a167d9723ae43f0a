"""Switch-reconfiguration plans restoring load without field dispatch.

Search is exhaustive over flips of switchable edges (up to max_actions of
them), which doubles as its own optimality oracle at desk scale. Remote
switching is costed at a fixed minutes-per-action and zero repair cost.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations

from . import grid, metrics
from .errors import NoFeasiblePlan, ValidationError

SWITCH_MINUTES_PER_ACTION = 5.0


@dataclass(frozen=True)
class RestorationPlan:
    actions: tuple[tuple[str, str], ...]  # (edge_id, target_state), ordered by edge id
    restored_critical: int
    restored_kw: float
    so_count: int
    feasible: bool
    resulting_tau: float
    composite: float = 0.0

    def as_dict(self) -> dict:
        return {
            "actions": [{"edge": e, "state": s} for e, s in self.actions],
            "restored_critical": self.restored_critical,
            "restored_kw": self.restored_kw,
            "so_count": self.so_count,
            "feasible": self.feasible,
            "resulting_tau": self.resulting_tau,
            "composite": self.composite,
        }


def _evaluate(net: grid.Network, edges: tuple[grid.Edge, ...], baseline) -> RestorationPlan:
    base_energized, base_served_kw, base_crit = baseline
    actions = []
    candidate = net
    for e in sorted(edges, key=lambda e: e.id):
        target = "open" if e.state == "closed" else "closed"
        candidate = grid.apply_switch_action(candidate, e.id, target)
        actions.append((e.id, target))
    energized = grid.energization_state(candidate)
    served_crit, _, _, _ = grid.critical_load_summary(candidate)
    served_kw = sum(n.load_kw for n in candidate.nodes if energized[n.id])
    # capacity-adequate: the plan must not shed anything that was served before
    sheds = any(base_energized[nid] and not energized[nid] for nid in energized)
    feasible = grid.is_radial(candidate) and not sheds
    return RestorationPlan(
        actions=tuple(actions),
        restored_critical=max(0, served_crit - base_crit),
        restored_kw=max(0.0, served_kw - base_served_kw),
        so_count=len(actions),
        feasible=feasible,
        resulting_tau=metrics.topological_coefficient(candidate),
    )


def enumerate_plans(net: grid.Network, max_actions: int) -> list[RestorationPlan]:
    """All improving plans over flips of <= max_actions switchable edges.

    Infeasible plans are included with feasible=False so callers can report
    them; plans that restore nothing are dropped.
    """
    if not 1 <= max_actions <= 4:
        raise ValidationError("max_actions must be in 1..4")
    switchable = sorted(
        (e for e in net.edges if e.switchable and e.state != "faulted"),
        key=lambda e: e.id,
    )
    base_energized = grid.energization_state(net)
    base_served_kw = sum(n.load_kw for n in net.nodes if base_energized[n.id])
    base_crit, _, _, _ = grid.critical_load_summary(net)
    baseline = (base_energized, base_served_kw, base_crit)
    plans = []
    for size in range(1, max_actions + 1):
        for combo in combinations(switchable, size):
            plan = _evaluate(net, combo, baseline)
            if plan.restored_kw > 0 or plan.restored_critical > 0:
                plans.append(plan)
    return plans


def _plan_indicators(plan: RestorationPlan) -> metrics.ResilienceIndicators:
    return metrics.ResilienceIndicators(
        T_r=plan.so_count * SWITCH_MINUTES_PER_ACTION / 60.0,
        C_r=0.0,
        tau=plan.resulting_tau,
        CL_r=plan.restored_critical,
        SO=plan.so_count,
    )


def rank_plans(net: grid.Network, ahp: metrics.AhpModel, max_actions: int) -> list[RestorationPlan]:
    """Feasible improving plans, best composite first."""
    feasible = [p for p in enumerate_plans(net, max_actions) if p.feasible]
    if not feasible:
        return []
    inds = [_plan_indicators(p) for p in feasible]
    scored = [
        replace(p, composite=metrics.composite_score(ind, inds, ahp))
        for p, ind in zip(feasible, inds)
    ]
    return sorted(scored, key=lambda p: (-p.composite, p.so_count, p.actions))


def best_restoration(
    net: grid.Network, ahp: metrics.AhpModel, max_actions: int = 2
) -> RestorationPlan:
    ranked = rank_plans(net, ahp, max_actions)
    if not ranked:
        raise NoFeasiblePlan("no feasible improving reconfiguration")
    return ranked[0]
