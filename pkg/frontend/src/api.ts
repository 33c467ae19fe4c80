// Thin typed client over the scenario service. The fetch implementation is
// injectable so tests can stub the transport.

import type {
  FacilityAdded,
  FacilityRemoved,
  MapResponse,
  RankResponse,
  RunInfo,
  ScenarioCreated,
  ValidationResponse,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: { method?: string; body?: string; headers?: Record<string, string> },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
  }
}

/** The surface the view-state machine needs; tests substitute doubles. */
export interface ScenarioApi {
  runInfo(): Promise<RunInfo>;
  mapLayer(scenario: string, layer: string): Promise<MapResponse>;
  createScenario(): Promise<ScenarioCreated>;
  deleteScenario(id: string): Promise<{ deleted: string }>;
  addFacility(
    scenario: string,
    x: number,
    y: number,
    demand?: number,
  ): Promise<FacilityAdded>;
  removeFacility(scenario: string, facilityId: number): Promise<FacilityRemoved>;
  rank(
    scenario: string,
    top?: number,
    candidates?: { id?: number; x: number; y: number }[],
  ): Promise<RankResponse>;
  validation(scenario: string): Promise<ValidationResponse>;
}

export class ApiClient implements ScenarioApi {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = globalThis.fetch as unknown as FetchLike,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: { method: string; body?: string; headers?: Record<string, string> } = {
      method,
    };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "Content-Type": "application/json" };
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    const payload = (await resp.json()) as T & { error?: string };
    if (!resp.ok) {
      throw new ApiError(resp.status, payload.error ?? `HTTP ${resp.status}`);
    }
    return payload;
  }

  runInfo(): Promise<RunInfo> {
    return this.request("GET", "/api/run");
  }

  mapLayer(scenario: string, layer: string): Promise<MapResponse> {
    const q = `scenario=${encodeURIComponent(scenario)}&layer=${encodeURIComponent(layer)}`;
    return this.request("GET", `/api/map?${q}`);
  }

  createScenario(): Promise<ScenarioCreated> {
    return this.request("POST", "/api/scenario");
  }

  deleteScenario(id: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/api/scenario/${id}`);
  }

  addFacility(
    scenario: string,
    x: number,
    y: number,
    demand?: number,
  ): Promise<FacilityAdded> {
    return this.request("POST", `/api/scenario/${scenario}/facilities`, {
      x,
      y,
      ...(demand === undefined ? {} : { demand }),
    });
  }

  removeFacility(scenario: string, facilityId: number): Promise<FacilityRemoved> {
    return this.request("DELETE", `/api/scenario/${scenario}/facilities/${facilityId}`);
  }

  rank(
    scenario: string,
    top?: number,
    candidates?: { id?: number; x: number; y: number }[],
  ): Promise<RankResponse> {
    return this.request("POST", "/api/rank", {
      scenario,
      ...(top === undefined ? {} : { top }),
      ...(candidates === undefined ? {} : { candidates }),
    });
  }

  validation(scenario: string): Promise<ValidationResponse> {
    return this.request("GET", `/api/validation?scenario=${encodeURIComponent(scenario)}`);
  }
}
