// End-to-end test against a real service instance: spawns the backend,
// serves the built console bundle, and drives the operator workflow through
// the same client the page uses.

import { spawn, type ChildProcess } from "node:child_process";
import { existsSync } from "node:fs";
import { createServer } from "node:net";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, Client } from "../../src/api";
import { BAND_ORDER, routeRows } from "../../src/view";

const DIST = fileURLToPath(new URL("../../dist", import.meta.url));

let proc: ChildProcess;
let base: string;
let api: Client;

function freePort(): Promise<number> {
  return new Promise((res, rej) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const addr = srv.address();
      if (addr && typeof addr === "object") {
        const port = addr.port;
        srv.close(() => res(port));
      } else {
        rej(new Error("no port"));
      }
    });
  });
}

async function waitForHealthy(url: string, timeoutMs = 60_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(url + "/v1/healthz");
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("service did not become healthy");
}

beforeAll(async () => {
  const port = await freePort();
  base = `http://127.0.0.1:${port}`;
  const args = ["-m", "rtrmt.cli", "serve", "--port", String(port)];
  if (existsSync(DIST)) args.push("--static", DIST);
  proc = spawn("python3", args, { stdio: "inherit" });
  await waitForHealthy(base);
  api = new Client(base);
});

afterAll(() => {
  proc?.kill("SIGTERM");
});

describe("console end-to-end", () => {
  it("serves the built bundle at /", async () => {
    if (!existsSync(DIST)) return; // bundle not built in this run
    const resp = await fetch(base + "/");
    expect(resp.status).toBe(200);
    const html = await resp.text();
    expect(html).toContain("operator console");
  });

  it("hotspot bands use the five-band blue→red partition", async () => {
    const hotspots = await api.hotspots();
    expect(hotspots.zones).toHaveLength(5);
    for (const z of hotspots.zones) {
      expect(BAND_ORDER).toContain(z.band);
      expect(z.intensity).toBeGreaterThanOrEqual(0);
      expect(z.intensity).toBeLessThanOrEqual(1);
    }
    const hottest = hotspots.zones.reduce((a, b) => (b.intensity > a.intensity ? b : a));
    expect(hottest.band).toBe("red");
    expect(hottest.no_go).toBe(true);
    const coolest = hotspots.zones.reduce((a, b) => (b.intensity < a.intensity ? b : a));
    expect(coolest.band).toBe("blue");
  });

  it("route workflow: search → recommended flag → propose → sign-off", async () => {
    const report = await api.searchRoutes(
      [
        { id: "T1", target: "n07", repair_hours: 2.0 },
        { id: "T2", target: "n10", repair_hours: 1.5 },
        { id: "T3", target: "n31", repair_hours: 1.0 },
      ],
      3,
    );
    expect(report.routes.length).toBeGreaterThanOrEqual(2);

    const rows = routeRows(report.routes);
    expect(rows[0].recommended).toBe(true);
    expect(rows.slice(1).every((r) => !r.recommended)).toBe(true);
    const best = Math.max(...report.routes.map((r) => r.composite));
    expect(report.routes[0].composite).toBe(best);

    const top = report.routes[0].id;
    // sign-off before propose must be refused (the UI disables the button;
    // the server enforces it regardless)
    await expect(api.signOff(top, "op-7")).rejects.toMatchObject({ status: 409 });

    const proposed = await api.propose(top);
    expect(proposed.status).toBe("proposed");
    const signed = await api.signOff(top, "op-7");
    expect(signed.status).toBe("signed_off");

    // server is the source of truth: re-proposing a signed-off route fails
    await expect(api.propose(top)).rejects.toBeInstanceOf(ApiError);
  });

  it("assistant box round-trips the lowest-voltage query", async () => {
    const answer = await api.query("what node has the lowest voltage");
    expect(answer.text).toMatch(/lowest voltage/);
    expect(typeof answer.data.id).toBe("string");
    expect(answer.text).toContain(String(answer.data.id));

    const help = await api.query("make me a sandwich");
    expect(help.text).toContain("Supported queries");
  });

  it("dashboard data: score in range, history grows with ticks", async () => {
    const latest = await api.resilience();
    expect(latest.score).toBeGreaterThanOrEqual(0.85);
    expect(latest.score).toBeLessThanOrEqual(0.95);

    const before = (await api.history()).records.length;
    await api.tick(2);
    const after = (await api.history()).records.length;
    expect(after).toBe(before + 2);

    const state = await api.state();
    expect(state.nodes).toHaveLength(45);
    expect(state.nodes.every((n) => n.energized)).toBe(true);
  });
});
