// Console entry point: wires the live map, score dashboard, route workflow
// and assistant box to the /v1 API, polling every 2 seconds. The server is
// the source of truth; a page refresh reloads all state from it.

import { ApiError, Client } from "./api";
import type { GridState, Hotspots, Route, ScoreRecord } from "./api";
import {
  bandColor,
  edgeStroke,
  gaugeArc,
  gaugeColor,
  makeProjection,
  nodeColor,
  parseTaskLines,
  routeRows,
  sparklinePoints,
  stageLabel,
  zoneTitle,
} from "./view";

const POLL_MS = 2000;

const api = new Client();
const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let lastRoutes: Route[] = [];

function drawMap(state: GridState, hotspots: Hotspots): void {
  const canvas = $<HTMLCanvasElement>("map");
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const proj = makeProjection(state.nodes, {
    width: canvas.width,
    height: canvas.height,
    pad: 24,
  });
  const pos = new Map(state.nodes.map((n) => [n.id, { x: proj.x(n.lon), y: proj.y(n.lat) }]));

  // hotspot circles first so the topology draws on top
  for (const z of hotspots.zones) {
    const cx = proj.x(z.lon);
    const cy = proj.y(z.lat);
    const r = z.radius_km * proj.kmToPx;
    ctx.beginPath();
    ctx.arc(cx, cy, r, 0, 2 * Math.PI);
    ctx.fillStyle = bandColor(z.band) + "33";
    ctx.fill();
    ctx.strokeStyle = bandColor(z.band);
    ctx.setLineDash(z.no_go ? [4, 4] : []);
    ctx.stroke();
    ctx.setLineDash([]);
    if (z.no_go) {
      // hatch the interior of no-go zones
      ctx.save();
      ctx.clip();
      ctx.strokeStyle = bandColor(z.band) + "66";
      for (let x = cx - r; x <= cx + r; x += 8) {
        ctx.beginPath();
        ctx.moveTo(x, cy - r);
        ctx.lineTo(x + r, cy + r);
        ctx.stroke();
      }
      ctx.restore();
    }
  }

  for (const e of state.edges) {
    const a = pos.get(e.from);
    const b = pos.get(e.to);
    if (!a || !b) continue;
    const style = edgeStroke(e);
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.strokeStyle = style.color;
    ctx.lineWidth = e.state === "faulted" ? 2.5 : 1.5;
    ctx.setLineDash(style.dash);
    ctx.stroke();
    ctx.setLineDash([]);
  }

  // signed-off / proposed route polylines
  for (const r of lastRoutes) {
    if (r.status !== "proposed" && r.status !== "signed_off") continue;
    ctx.strokeStyle = r.status === "signed_off" ? "#1b5e20" : "#f9a825";
    ctx.lineWidth = 3;
    for (const leg of r.legs) {
      ctx.beginPath();
      leg.forEach((nid, i) => {
        const p = pos.get(nid);
        if (!p) return;
        if (i === 0) ctx.moveTo(p.x, p.y);
        else ctx.lineTo(p.x, p.y);
      });
      ctx.stroke();
    }
  }

  for (const n of state.nodes) {
    const p = pos.get(n.id)!;
    ctx.beginPath();
    ctx.arc(p.x, p.y, n.kind === "source" ? 6 : n.critical ? 5 : 3.5, 0, 2 * Math.PI);
    ctx.fillStyle = nodeColor(n);
    ctx.fill();
  }

  $<HTMLElement>("map-caption").textContent =
    `${state.clock} · tick ${state.tick_index} · ${stageLabel(state)} · ` +
    hotspots.zones.map((z) => zoneTitle(z)).join(" | ");
}

function drawDashboard(latest: ScoreRecord, history: ScoreRecord[]): void {
  $<HTMLElement>("score-value").textContent = latest.score.toFixed(3);
  const needle = $<HTMLElement>("gauge-arc");
  needle.setAttribute("d", gaugeArc(latest.score, 110, 100, 80));
  needle.setAttribute("stroke", gaugeColor(latest.score));

  const comp = $<HTMLElement>("components");
  comp.innerHTML = Object.entries(latest.components)
    .map(([k, v]) => `<li>${k.replace("_", " ")}: <b>${v.toFixed(3)}</b></li>`)
    .join("");

  const pts = sparklinePoints(history.map((r) => r.score), 220, 48);
  $<HTMLElement>("sparkline").setAttribute(
    "points",
    pts.map((p) => `${p.x.toFixed(1)},${p.y.toFixed(1)}`).join(" "),
  );
}

function renderRouteTable(): void {
  const tbody = $<HTMLElement>("route-rows");
  tbody.innerHTML = "";
  for (const row of routeRows(lastRoutes)) {
    const tr = document.createElement("tr");
    if (row.recommended) tr.className = "recommended";
    tr.innerHTML =
      `<td>${row.id}${row.recommended ? " ★" : ""}</td><td>${row.order}</td>` +
      `<td>${row.hours}</td><td>${row.composite}</td><td>${row.status}</td>`;
    const td = document.createElement("td");
    const propose = document.createElement("button");
    propose.textContent = "propose";
    propose.disabled = !row.canPropose;
    propose.onclick = () => act(() => api.propose(row.id));
    const sign = document.createElement("button");
    sign.textContent = "sign off";
    sign.disabled = !row.canSignOff;
    sign.onclick = () => {
      const operator = window.prompt("Operator id for sign-off:", "");
      if (operator) act(() => api.signOff(row.id, operator));
    };
    td.append(propose, sign);
    tr.appendChild(td);
    tbody.appendChild(tr);
  }
}

async function act(fn: () => Promise<{ id: string; status: string }>): Promise<void> {
  try {
    const result = await fn();
    const route = lastRoutes.find((r) => r.id === result.id);
    if (route) route.status = result.status;
    renderRouteTable();
  } catch (err) {
    showError(err);
  }
}

function showError(err: unknown): void {
  const box = $<HTMLElement>("errors");
  box.textContent =
    err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
  window.setTimeout(() => {
    box.textContent = "";
  }, 6000);
}

async function searchRoutes(): Promise<void> {
  const { tasks, errors } = parseTaskLines($<HTMLTextAreaElement>("task-input").value);
  if (errors.length > 0 || tasks.length === 0) {
    showError(new Error(errors[0] ?? "enter at least one task"));
    return;
  }
  try {
    const report = await api.searchRoutes(tasks);
    lastRoutes = report.routes;
    $<HTMLElement>("deferred").textContent = report.deferred.length
      ? "Deferred: " + report.deferred.map((d) => `${d.id} (${d.reason})`).join(", ")
      : "";
    renderRouteTable();
  } catch (err) {
    showError(err);
  }
}

async function askAssistant(): Promise<void> {
  const input = $<HTMLInputElement>("assistant-input");
  const text = input.value.trim();
  if (!text) return;
  const log = $<HTMLElement>("assistant-log");
  const you = document.createElement("p");
  you.className = "you";
  you.textContent = `> ${text}`;
  log.appendChild(you);
  try {
    const answer = await api.query(text);
    const reply = document.createElement("pre");
    reply.textContent = answer.text;
    log.appendChild(reply);
  } catch (err) {
    showError(err);
  }
  input.value = "";
  log.scrollTop = log.scrollHeight;
}

async function poll(): Promise<void> {
  try {
    const [state, hotspots, latest, history] = await Promise.all([
      api.state(),
      api.hotspots(),
      api.resilience(),
      api.history(),
    ]);
    drawMap(state, hotspots);
    drawDashboard(latest, history.records);
  } catch {
    // transient poll failures are retried on the next interval
  }
}

export function start(): void {
  $<HTMLElement>("route-search").onclick = () => void searchRoutes();
  $<HTMLElement>("assistant-send").onclick = () => void askAssistant();
  $<HTMLInputElement>("assistant-input").addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") void askAssistant();
  });
  void poll();
  window.setInterval(() => void poll(), POLL_MS);
}

if (typeof document !== "undefined" && document.getElementById("map")) {
  start();
}
