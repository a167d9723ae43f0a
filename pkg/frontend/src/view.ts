// Pure view-model helpers: band colors, map projection, gauge/sparkline
// geometry, and the route-table model. No DOM access, so everything here is
// unit-testable without a browser.

import type { EdgeState, GridState, NodeState, Route, Zone } from "./api";

// Five-band partition, blue lowest to red highest, matching the server's
// `band` field. Colors are the console's only styling decision.
export const BAND_COLORS: Record<string, string> = {
  blue: "#1565c0",
  green: "#2e7d32",
  yellow: "#f9a825",
  orange: "#ef6c00",
  red: "#c62828",
};

export const BAND_ORDER = ["blue", "green", "yellow", "orange", "red"] as const;

export function bandColor(band: string): string {
  return BAND_COLORS[band] ?? "#999";
}

export interface Viewport {
  width: number;
  height: number;
  pad: number;
}

export interface Projection {
  x(lon: number): number;
  y(lat: number): number;
  kmToPx: number;
}

const KM_PER_DEG_LAT = 111.32;

/** Equirectangular fit of the node bounding box into the viewport. */
export function makeProjection(nodes: NodeState[], vp: Viewport): Projection {
  const lats = nodes.map((n) => n.lat);
  const lons = nodes.map((n) => n.lon);
  const latMin = Math.min(...lats);
  const latMax = Math.max(...lats);
  const lonMin = Math.min(...lons);
  const lonMax = Math.max(...lons);
  const latMid = (latMin + latMax) / 2;
  const kmPerDegLon = KM_PER_DEG_LAT * Math.cos((latMid * Math.PI) / 180);
  const widthKm = Math.max((lonMax - lonMin) * kmPerDegLon, 1e-6);
  const heightKm = Math.max((latMax - latMin) * KM_PER_DEG_LAT, 1e-6);
  const scale = Math.min(
    (vp.width - 2 * vp.pad) / widthKm,
    (vp.height - 2 * vp.pad) / heightKm,
  );
  return {
    x: (lon) => vp.pad + (lon - lonMin) * kmPerDegLon * scale,
    y: (lat) => vp.height - vp.pad - (lat - latMin) * KM_PER_DEG_LAT * scale,
    kmToPx: scale,
  };
}

export function nodeColor(n: NodeState): string {
  if (!n.energized) return "#9e9e9e";
  if (n.kind === "source") return "#6a1b9a";
  if (n.kind === "der") return "#00838f";
  if (n.critical) return "#c62828";
  return "#2e7d32";
}

export function edgeStroke(e: EdgeState): { color: string; dash: number[] } {
  if (e.state === "faulted") return { color: "#d50000", dash: [2, 3] };
  if (e.state === "open") return { color: "#9e9e9e", dash: [6, 4] };
  return { color: "#37474f", dash: [] };
}

/** SVG arc path for a 0..1 gauge over a 180-degree dial. */
export function gaugeArc(score: number, cx: number, cy: number, r: number): string {
  const frac = Math.max(0, Math.min(1, score));
  const angle = Math.PI * (1 - frac); // PI at 0, 0 at 1
  const x = cx + r * Math.cos(angle);
  const y = cy - r * Math.sin(angle);
  const largeArc = frac > 0.5 ? 1 : 0;
  return `M ${cx - r} ${cy} A ${r} ${r} 0 ${largeArc} 1 ${x.toFixed(2)} ${y.toFixed(2)}`;
}

export function gaugeColor(score: number): string {
  if (score >= 0.8) return BAND_COLORS.green;
  if (score >= 0.5) return BAND_COLORS.yellow;
  return BAND_COLORS.red;
}

/** Polyline points for the score history sparkline, y locked to [0, 1]. */
export function sparklinePoints(
  scores: number[],
  width: number,
  height: number,
): { x: number; y: number }[] {
  if (scores.length === 0) return [];
  const n = scores.length;
  return scores.map((s, i) => ({
    x: n === 1 ? width / 2 : (width * i) / (n - 1),
    y: height * (1 - Math.max(0, Math.min(1, s))),
  }));
}

export interface RouteRow {
  id: string;
  order: string;
  hours: string;
  composite: string;
  status: string;
  recommended: boolean;
  canPropose: boolean;
  canSignOff: boolean;
}

/** Route-table rows; the top composite is flagged as recommended. */
export function routeRows(routes: Route[]): RouteRow[] {
  const best = routes.reduce((m, r) => Math.max(m, r.composite), -Infinity);
  return routes.map((r, i) => ({
    id: r.id,
    order: r.task_order.join(" → "),
    hours: (r.indicators?.T_r ?? r.total_travel_hours).toFixed(2),
    composite: r.composite.toFixed(3),
    status: r.status,
    recommended: i === 0 && r.composite === best,
    canPropose: r.status === "candidate",
    canSignOff: r.status === "proposed",
  }));
}

export function zoneTitle(z: Zone): string {
  const noGo = z.no_go ? ", NO-GO" : "";
  return `${z.name} (${z.zone_id}): ${z.active_cases} active, band ${z.band}${noGo}`;
}

export function stageLabel(state: GridState): string {
  const labels: Record<string, string> = {
    pre_event: "pre-event",
    during_event: "during event",
    post_event: "post-event",
  };
  return labels[state.stage] ?? state.stage;
}

/** Parse the task entry form: one `id,target,hours` triple per line. */
export function parseTaskLines(
  text: string,
): { tasks: { id: string; target: string; repair_hours: number }[]; errors: string[] } {
  const tasks: { id: string; target: string; repair_hours: number }[] = [];
  const errors: string[] = [];
  const seen = new Set<string>();
  text
    .split("\n")
    .map((ln) => ln.trim())
    .filter((ln) => ln.length > 0)
    .forEach((ln, i) => {
      const parts = ln.split(",").map((p) => p.trim());
      const hours = Number(parts[2]);
      if (parts.length !== 3 || !parts[0] || !parts[1] || !(hours > 0)) {
        errors.push(`line ${i + 1}: expected "id,target,hours" with hours > 0`);
        return;
      }
      if (seen.has(parts[0])) {
        errors.push(`line ${i + 1}: duplicate task id ${parts[0]}`);
        return;
      }
      seen.add(parts[0]);
      tasks.push({ id: parts[0], target: parts[1], repair_hours: hours });
    });
  return { tasks, errors };
}
