// Typed client for the rtrmt /v1 API. The console never recomputes scores or
// risk client-side; everything rendered comes from these responses.

export interface NodeState {
  id: string;
  kind: string;
  lat: number;
  lon: number;
  load_kw: number;
  critical: boolean;
  capacity_kw: number;
  voltage_pu: number;
  energized: boolean;
}

export interface EdgeState {
  id: string;
  from: string;
  to: string;
  state: "closed" | "open" | "faulted";
  switchable: boolean;
  length_km: number;
}

export interface GridState {
  stage: string;
  depot: string;
  tick_index: number;
  clock: string;
  nodes: NodeState[];
  edges: EdgeState[];
}

export interface ScoreRecord {
  timestamp: string;
  score: number;
  components: Record<string, number>;
  stage: string;
}

export interface Zone {
  zone_id: string;
  name: string;
  lat: number;
  lon: number;
  radius_km: number;
  intensity: number;
  active_cases: number;
  band: string;
  no_go: boolean;
}

export interface Hotspots {
  date: string;
  theta: number;
  zones: Zone[];
}

export interface RouteIndicators {
  T_r: number;
  C_r: number;
  tau: number;
  CL_r: number;
  SO: number;
}

export interface Route {
  id: string;
  task_order: string[];
  legs: string[][];
  total_travel_hours: number;
  max_leg_risk: number;
  indicators: RouteIndicators | null;
  composite: number;
  status: string;
}

export interface RouteReport {
  routes: Route[];
  deferred: { id: string; target: string; reason: string }[];
}

export interface TaskInput {
  id: string;
  target: string;
  repair_hours: number;
  repair_cost?: number;
}

export interface AssistantAnswer {
  text: string;
  data: Record<string, unknown>;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(base + path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  const body = await resp.json();
  if (!resp.ok) {
    throw new ApiError(resp.status, body.error ?? "error", body.message ?? resp.statusText);
  }
  return body as T;
}

export class Client {
  constructor(private base: string = "") {}

  state(): Promise<GridState> {
    return request(this.base, "/v1/state");
  }

  resilience(): Promise<ScoreRecord> {
    return request(this.base, "/v1/resilience");
  }

  history(): Promise<{ records: ScoreRecord[] }> {
    return request(this.base, "/v1/resilience/history");
  }

  hotspots(date?: string): Promise<Hotspots> {
    const qs = date ? `?date=${encodeURIComponent(date)}` : "";
    return request(this.base, `/v1/hotspots${qs}`);
  }

  searchRoutes(tasks: TaskInput[], k = 3): Promise<RouteReport> {
    return request(this.base, "/v1/routes/search", {
      method: "POST",
      body: JSON.stringify({ tasks, k }),
    });
  }

  propose(routeId: string): Promise<{ id: string; status: string }> {
    return request(this.base, `/v1/routes/${routeId}/propose`, {
      method: "POST",
      body: "{}",
    });
  }

  signOff(routeId: string, operator: string): Promise<{ id: string; status: string }> {
    return request(this.base, `/v1/routes/${routeId}/signoff`, {
      method: "POST",
      body: JSON.stringify({ operator }),
    });
  }

  searchRestoration(maxActions = 2): Promise<{ plans: Record<string, unknown>[] }> {
    return request(this.base, "/v1/restoration/search", {
      method: "POST",
      body: JSON.stringify({ max_actions: maxActions }),
    });
  }

  tick(n = 1): Promise<ScoreRecord> {
    return request(this.base, "/v1/ticks", { method: "POST", body: JSON.stringify({ n }) });
  }

  query(text: string): Promise<AssistantAnswer> {
    return request(this.base, "/v1/query", { method: "POST", body: JSON.stringify({ text }) });
  }
}
