"""Headless command-line driver.

Exit codes: 0 success, 2 validation error, 3 infeasible request
(all tasks deferred, no feasible plan, unreachable), 4 I/O failure.
Errors go to stderr as one JSON object per failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from datetime import date
from pathlib import Path

from . import grid, hotspot, metrics, restoration, routing, telemetry
from .errors import (
    AllTasksDeferred,
    ConfigError,
    DateOutOfRange,
    InconsistentJudgments,
    IoError,
    MonotonicityError,
    NoFeasiblePlan,
    ParseError,
    RtrmtError,
    Unreachable,
    ValidationError,
)

EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

_INFEASIBLE = (AllTasksDeferred, NoFeasiblePlan, Unreachable)
_VALIDATION = (
    ParseError,
    ValidationError,
    ConfigError,
    MonotonicityError,
    DateOutOfRange,
    InconsistentJudgments,
)


def _data(name: str) -> str:
    from importlib import resources

    return str(resources.files("rtrmt").joinpath("data", name))


def _fail(exc: Exception, code: int) -> int:
    err = getattr(exc, "code", "error")
    json.dump({"error": err, "message": str(exc)}, sys.stderr)
    sys.stderr.write("\n")
    return code


def _load_ahp(path: str | None) -> metrics.AhpModel:
    return metrics.load_ahp_config(path or _data("ahp_default.json"))


def cmd_score(args) -> int:
    net = grid.load_network(args.network)
    weights = metrics.load_realtime_weights(args.weights) if args.weights else None
    record = metrics.realtime_score(net, weights=weights)
    json.dump(
        {"score": record.score, "components": record.components, "stage": record.stage.value},
        sys.stdout,
        indent=2,
    )
    sys.stdout.write("\n")
    return 0


def cmd_route(args) -> int:
    net = grid.load_network(args.network)
    tasks = routing.load_tasks(args.tasks, net)
    cases = hotspot.ingest_cases(args.cases)
    field = hotspot.build_risk_field(cases, date.fromisoformat(args.date))
    g = routing.build_travel_graph(net, field, theta=args.theta, beta=args.beta)
    candidates, deferred = routing.candidate_routes(g, tasks, k=args.k)
    ranked = routing.rank_routes(candidates, net, tasks, _load_ahp(args.ahp))
    json.dump(routing.route_report(ranked, deferred), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def cmd_restore(args) -> int:
    net = grid.load_network(args.network)
    plan = restoration.best_restoration(net, _load_ahp(args.ahp), max_actions=args.max_actions)
    json.dump(plan.as_dict(), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


def cmd_run(args) -> int:
    script = telemetry.load_script(args.scenario)
    net = grid.load_network(script.network_path or _data("net45.json"))
    cases = hotspot.ingest_cases(script.cases_path or _data("cases_wa.csv"))
    weights = metrics.load_realtime_weights(args.weights) if args.weights else None
    state = telemetry.replay(script, net, cases, seed=args.seed, weights=weights)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "scores.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["timestamp", "score", "critical_served", "load_served", "reserve_margin", "tau_ratio", "stage"]
            )
            for r in state.scores:
                writer.writerow(
                    [
                        r.timestamp.isoformat(),
                        f"{r.score:.12g}",
                        f"{r.components['critical_served']:.12g}",
                        f"{r.components['load_served']:.12g}",
                        f"{r.components['reserve_margin']:.12g}",
                        f"{r.components['tau_ratio']:.12g}",
                        r.stage.value,
                    ]
                )
        (out / "events.ndjson").write_text(telemetry.log_lines(state), encoding="utf-8")
    except OSError as exc:
        raise IoError(str(exc)) from exc
    print(f"wrote {len(state.scores)} score records to {out}")
    return 0


def cmd_convert_jhu(args) -> int:
    n = hotspot.convert_jhu(args.infile, args.outfile)
    print(f"wrote {n} rows to {args.outfile}")
    return 0


def _svg_timeline(rows: list[dict], width=720, height=220, pad=40) -> str:
    if not rows:
        return "<svg/>"
    n = len(rows)
    pts = []
    for i, r in enumerate(rows):
        x = pad + (width - 2 * pad) * (i / max(1, n - 1))
        y = height - pad - (height - 2 * pad) * float(r["score"])
        pts.append(f"{x:.1f},{y:.1f}")
    gridlines = []
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = height - pad - (height - 2 * pad) * frac
        gridlines.append(
            f'<line x1="{pad}" y1="{y:.1f}" x2="{width - pad}" y2="{y:.1f}" stroke="#ddd"/>'
            f'<text x="4" y="{y + 4:.1f}" font-size="10" fill="#666">{frac:.2f}</text>'
        )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        + "".join(gridlines)
        + f'<polyline fill="none" stroke="#1565c0" stroke-width="2" points="{" ".join(pts)}"/>'
        + "</svg>"
    )


def cmd_report(args) -> int:
    run_dir = Path(args.run)
    scores_path = run_dir / "scores.csv"
    if not scores_path.is_file():
        raise IoError(f"no scores.csv under {run_dir}")
    with open(scores_path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    routes_path = run_dir / "routes.json"
    routes_html = ""
    if routes_path.is_file():
        doc = json.loads(routes_path.read_text(encoding="utf-8"))
        body = "".join(
            f"<tr><td>{r['id']}</td><td>{' → '.join(r['task_order'])}</td>"
            f"<td>{r['indicators']['T_r']:.2f}</td><td>{r['composite']:.3f}</td></tr>"
            for r in doc.get("routes", [])
        )
        routes_html = (
            "<h2>Routes</h2><table border='1' cellpadding='4'>"
            "<tr><th>id</th><th>order</th><th>T_r (h)</th><th>composite</th></tr>"
            + body
            + "</table>"
        )
    html = (
        "<!doctype html><html><head><meta charset='utf-8'>"
        "<title>rtrmt run report</title></head><body>"
        f"<h1>Score timeline ({len(rows)} records)</h1>"
        + _svg_timeline(rows)
        + routes_html
        + "</body></html>"
    )
    out = run_dir / "report.html"
    out.write_text(html, encoding="utf-8")
    print(f"wrote {out}")
    return 0


def cmd_serve(args) -> int:
    from .service import EngineConfig, serve

    config = EngineConfig.defaults(
        **{
            k: v
            for k, v in {
                "network_path": args.network,
                "cases_path": args.cases,
                "ahp_path": args.ahp,
                "seed": args.seed,
                "tick_interval_s": args.tick_interval,
                "log_path": args.log,
                "static_dir": args.static,
            }.items()
            if v is not None
        }
    )
    serve(config, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtrmt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="print the real-time resilience score breakdown")
    p.add_argument("--network", default=_data("net45.json"))
    p.add_argument("--weights", default=None)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("route", help="rank crew-dispatch routes")
    p.add_argument("--network", default=_data("net45.json"))
    p.add_argument("--tasks", required=True)
    p.add_argument("--cases", default=_data("cases_wa.csv"))
    p.add_argument("--date", required=True)
    p.add_argument("--k", type=int, default=routing.DEFAULT_K)
    p.add_argument("--theta", type=float, default=hotspot.DEFAULT_NO_GO_THRESHOLD)
    p.add_argument("--beta", type=float, default=routing.DEFAULT_BETA)
    p.add_argument("--ahp", default=None)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("restore", help="best switch-reconfiguration plan")
    p.add_argument("--network", required=True)
    p.add_argument("--max-actions", type=int, default=2, dest="max_actions")
    p.add_argument("--ahp", default=None)
    p.set_defaults(func=cmd_restore)

    p = sub.add_parser("run", help="replay a scenario script")
    p.add_argument("--scenario", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--weights", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("convert-jhu", help="convert a JHU daily report to canonical CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.set_defaults(func=cmd_convert_jhu)

    p = sub.add_parser("report", help="render a static HTML/SVG report for a run")
    p.add_argument("--run", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--network", default=None)
    p.add_argument("--cases", default=None)
    p.add_argument("--ahp", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tick-interval", type=float, default=None, dest="tick_interval")
    p.add_argument("--log", default=None)
    p.add_argument("--static", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INFEASIBLE as exc:
        return _fail(exc, EXIT_INFEASIBLE)
    except _VALIDATION as exc:
        return _fail(exc, EXIT_VALIDATION)
    except IoError as exc:
        return _fail(exc, EXIT_IO)
    except OSError as exc:
        return _fail(exc, EXIT_IO)
    except RtrmtError as exc:
        return _fail(exc, EXIT_VALIDATION)


if __name__ == "__main__":
    sys.exit(main())
