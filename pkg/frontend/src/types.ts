// Wire types mirroring the scenario service responses.

export interface GridJson {
  ncols: number;
  nrows: number;
  xll: number;
  yll: number;
  cellsize: number;
  nodata: number;
  values: number[]; // row-major, row 0 = north
}

export type LayerName = "score" | "class" | "sdr" | string;

export interface MapResponse {
  scenario: string;
  revision: number;
  layer: LayerName;
  grid: GridJson;
}

export interface RankedSite {
  rank: number;
  id: number;
  x: number;
  y: number;
  score: number;
  class: number | null;
}

export interface RankResponse {
  scenario: string;
  revision: number;
  ranked: RankedSite[];
  excluded: number[];
}

export interface SdrRow {
  county_id: number;
  supply: number;
  existing_demand: number;
  d_new_share: number;
  sdr: number | null;
  defined: boolean;
}

export interface FacilityInfo {
  id: number;
  x: number;
  y: number;
  demand: number;
  status: string;
}

export interface RunInfo {
  run_id: string;
  best_kind: string;
  criteria: string[];
  weights: Record<string, number>;
  per_model_weights: Record<string, Record<string, number>>;
  breaks: number[];
  radius: number;
  d_new: number;
  facilities: FacilityInfo[];
  candidates: { id: number; x: number; y: number }[];
  revision: number;
}

export interface ScenarioCreated {
  scenario: string;
  revision: number;
}

export interface FacilityAdded {
  scenario: string;
  revision: number;
  facility_id: number;
  sdr: SdrRow[];
}

export interface FacilityRemoved {
  scenario: string;
  revision: number;
  sdr: SdrRow[];
}

export interface ValidationResponse {
  scenario: string;
  revision: number;
  validation: {
    counts: number[];
    percentages: number[];
    nodata_count: number;
    total: number;
  };
}
