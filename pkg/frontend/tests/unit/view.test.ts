import { describe, expect, it } from "vitest";

import type { NodeState, Route } from "../../src/api";
import {
  BAND_COLORS,
  BAND_ORDER,
  bandColor,
  edgeStroke,
  gaugeArc,
  gaugeColor,
  makeProjection,
  nodeColor,
  parseTaskLines,
  routeRows,
  sparklinePoints,
} from "../../src/view";

function node(partial: Partial<NodeState>): NodeState {
  return {
    id: "n1",
    kind: "bus",
    lat: 0,
    lon: 0,
    load_kw: 10,
    critical: false,
    capacity_kw: 0,
    voltage_pu: 1,
    energized: true,
    ...partial,
  };
}

function route(partial: Partial<Route>): Route {
  return {
    id: "R1",
    task_order: ["T1"],
    legs: [],
    total_travel_hours: 1,
    max_leg_risk: 0,
    indicators: null,
    composite: 0.5,
    status: "candidate",
    ...partial,
  };
}

describe("band colors", () => {
  it("covers the five-band partition blue through red", () => {
    expect(BAND_ORDER).toEqual(["blue", "green", "yellow", "orange", "red"]);
    for (const band of BAND_ORDER) {
      expect(BAND_COLORS[band]).toMatch(/^#[0-9a-f]{6}$/);
    }
  });

  it("distinct colors per band, fallback for unknown", () => {
    expect(new Set(Object.values(BAND_COLORS)).size).toBe(5);
    expect(bandColor("mauve")).toBe("#999");
  });
});

describe("projection", () => {
  const nodes = [
    node({ id: "a", lat: 47.0, lon: -120.5 }),
    node({ id: "b", lat: 47.5, lon: -120.0 }),
  ];
  const vp = { width: 760, height: 520, pad: 24 };

  it("keeps every node inside the padded viewport", () => {
    const proj = makeProjection(nodes, vp);
    for (const n of nodes) {
      expect(proj.x(n.lon)).toBeGreaterThanOrEqual(vp.pad - 1e-9);
      expect(proj.x(n.lon)).toBeLessThanOrEqual(vp.width - vp.pad + 1e-9);
      expect(proj.y(n.lat)).toBeGreaterThanOrEqual(vp.pad - 1e-9);
      expect(proj.y(n.lat)).toBeLessThanOrEqual(vp.height - vp.pad + 1e-9);
    }
  });

  it("north is up and east is right", () => {
    const proj = makeProjection(nodes, vp);
    expect(proj.y(47.5)).toBeLessThan(proj.y(47.0));
    expect(proj.x(-120.0)).toBeGreaterThan(proj.x(-120.5));
  });

  it("preserves aspect ratio: one scale for both axes", () => {
    const proj = makeProjection(nodes, vp);
    expect(proj.kmToPx).toBeGreaterThan(0);
  });

  it("degenerate single-point input stays finite", () => {
    const proj = makeProjection([nodes[0]], vp);
    expect(Number.isFinite(proj.x(-120.5))).toBe(true);
    expect(Number.isFinite(proj.y(47.0))).toBe(true);
  });
});

describe("map styling", () => {
  it("de-energized nodes gray regardless of kind", () => {
    expect(nodeColor(node({ kind: "source", energized: false }))).toBe("#9e9e9e");
    expect(nodeColor(node({ critical: true, energized: false }))).toBe("#9e9e9e");
  });

  it("fault glyph distinct from open and closed", () => {
    const faulted = edgeStroke({ id: "e", from: "a", to: "b", state: "faulted", switchable: false, length_km: 1 });
    const open = edgeStroke({ id: "e", from: "a", to: "b", state: "open", switchable: true, length_km: 1 });
    const closed = edgeStroke({ id: "e", from: "a", to: "b", state: "closed", switchable: false, length_km: 1 });
    expect(faulted.color).not.toBe(open.color);
    expect(faulted.color).not.toBe(closed.color);
    expect(closed.dash).toEqual([]);
    expect(open.dash.length).toBeGreaterThan(0);
  });
});

describe("gauge", () => {
  it("score 0 collapses to the left anchor, score 1 spans the dial", () => {
    const zero = gaugeArc(0, 110, 100, 80);
    expect(zero).toContain("M 30 100");
    expect(zero).toContain("30.00 100.00");
    const one = gaugeArc(1, 110, 100, 80);
    expect(one).toContain("190.00 100.00");
  });

  it("clamps out-of-range scores", () => {
    expect(gaugeArc(1.7, 110, 100, 80)).toBe(gaugeArc(1, 110, 100, 80));
    expect(gaugeArc(-2, 110, 100, 80)).toBe(gaugeArc(0, 110, 100, 80));
  });

  it("color thresholds", () => {
    expect(gaugeColor(0.9)).toBe(BAND_COLORS.green);
    expect(gaugeColor(0.6)).toBe(BAND_COLORS.yellow);
    expect(gaugeColor(0.2)).toBe(BAND_COLORS.red);
  });
});

describe("sparkline", () => {
  it("spans the width and inverts y", () => {
    const pts = sparklinePoints([0, 0.5, 1], 220, 48);
    expect(pts.map((p) => p.x)).toEqual([0, 110, 220]);
    expect(pts[0].y).toBe(48);
    expect(pts[2].y).toBe(0);
  });

  it("handles empty and single-point histories", () => {
    expect(sparklinePoints([], 220, 48)).toEqual([]);
    const single = sparklinePoints([0.9], 220, 48);
    expect(single).toHaveLength(1);
    expect(single[0].x).toBe(110);
    expect(single[0].y).toBeCloseTo(48 * 0.1, 10);
  });
});

describe("route table model", () => {
  it("flags only the top-ranked route as recommended", () => {
    const rows = routeRows([
      route({ id: "R1", composite: 1.0 }),
      route({ id: "R2", composite: 0.8 }),
      route({ id: "R3", composite: 0.8 }),
    ]);
    expect(rows.map((r) => r.recommended)).toEqual([true, false, false]);
  });

  it("sign-off enabled only after propose", () => {
    const rows = routeRows([
      route({ id: "R1", status: "candidate" }),
      route({ id: "R2", status: "proposed" }),
      route({ id: "R3", status: "signed_off" }),
    ]);
    expect(rows[0]).toMatchObject({ canPropose: true, canSignOff: false });
    expect(rows[1]).toMatchObject({ canPropose: false, canSignOff: true });
    expect(rows[2]).toMatchObject({ canPropose: false, canSignOff: false });
  });
});

describe("task form parsing", () => {
  it("accepts id,target,hours lines", () => {
    const { tasks, errors } = parseTaskLines("T1,n07,2.0\n\nT2, n10 , 1.5\n");
    expect(errors).toEqual([]);
    expect(tasks).toEqual([
      { id: "T1", target: "n07", repair_hours: 2 },
      { id: "T2", target: "n10", repair_hours: 1.5 },
    ]);
  });

  it("reports malformed lines and duplicates", () => {
    const { tasks, errors } = parseTaskLines("T1,n07,2.0\nbogus\nT1,n10,1.0\nT2,n11,-3");
    expect(tasks).toHaveLength(1);
    expect(errors).toHaveLength(3);
    expect(errors[1]).toContain("duplicate");
  });
});
