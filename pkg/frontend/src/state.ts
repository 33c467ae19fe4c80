// Scenario view-state machine. All numbers shown on screen come from
// service responses; the only local bookkeeping is revision ordering,
// optimistic pins, and per-revision layer caches.

import type { ScenarioApi } from "./api.js";
import type { GridJson, RankedSite, RunInfo, SdrRow } from "./types.js";

export interface Pin {
  x: number;
  y: number;
  facilityId: number | null; // null while the placement is in flight
}

export interface CellReadout {
  x: number;
  y: number;
  score: number | null;
  classLabel: number | null;
  criteria: Record<string, number>;
}

export interface ViewState {
  scenario: string;
  layer: string;
  revision: number;
  grid: GridJson | null;
  sdr: SdrRow[];
  ranked: RankedSite[];
  pins: Pin[];
  toasts: string[];
  readout: CellReadout | null;
}

type Listener = (state: ViewState) => void;

export class ScenarioView {
  state: ViewState = {
    scenario: "base",
    layer: "score",
    revision: -1,
    grid: null,
    sdr: [],
    ranked: [],
    pins: [],
    toasts: [],
    readout: null,
  };

  runInfo: RunInfo | null = null;
  private layerCache = new Map<string, { revision: number; grid: GridJson }>();
  private listeners: Listener[] = [];

  constructor(private api: ScenarioApi) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  private toast(message: string): void {
    this.state.toasts = [...this.state.toasts, message];
    this.notify();
  }

  /** Apply a response only if it is at least as new as the current view. */
  private accept(revision: number): boolean {
    if (revision < this.state.revision) {
      return false; // stale response, discard
    }
    if (revision > this.state.revision) {
      this.layerCache.clear();
      this.state.revision = revision;
    }
    return true;
  }

  async init(): Promise<void> {
    this.runInfo = await this.api.runInfo();
    const created = await this.api.createScenario();
    this.state.scenario = created.scenario;
    this.state.revision = created.revision;
    await this.refresh();
  }

  async selectLayer(layer: string): Promise<void> {
    this.state.layer = layer;
    await this.refreshMap();
    this.notify();
  }

  private async fetchLayer(layer: string): Promise<GridJson | null> {
    const cached = this.layerCache.get(layer);
    if (cached && cached.revision === this.state.revision) {
      return cached.grid;
    }
    const resp = await this.api.mapLayer(this.state.scenario, layer);
    if (!this.accept(resp.revision)) {
      return null;
    }
    this.layerCache.set(layer, { revision: resp.revision, grid: resp.grid });
    return resp.grid;
  }

  private async refreshMap(): Promise<void> {
    const grid = await this.fetchLayer(this.state.layer);
    if (grid) {
      this.state.grid = grid;
    }
  }

  private async refreshRank(): Promise<void> {
    const resp = await this.api.rank(this.state.scenario);
    if (this.accept(resp.revision)) {
      // ordering is the service's, verbatim
      this.state.ranked = resp.ranked;
    }
  }

  async refresh(): Promise<void> {
    await this.refreshMap();
    await this.refreshRank();
    this.notify();
  }

  /** Click-to-place: optimistic pin, then reconcile with the service. */
  async place(x: number, y: number, demand?: number): Promise<Pin | null> {
    const pin: Pin = { x, y, facilityId: null };
    this.state.pins = [...this.state.pins, pin];
    this.notify();
    try {
      const resp = await this.api.addFacility(this.state.scenario, x, y, demand);
      pin.facilityId = resp.facility_id;
      if (this.accept(resp.revision)) {
        this.state.sdr = resp.sdr;
      }
      await this.refresh();
      return pin;
    } catch (err) {
      this.state.pins = this.state.pins.filter((p) => p !== pin);
      this.toast(`placement failed: ${err instanceof Error ? err.message : err}`);
      return null;
    }
  }

  /** Remove the most recent confirmed pin; restores the pre-place view. */
  async undoLast(): Promise<void> {
    const confirmed = [...this.state.pins].reverse().find((p) => p.facilityId !== null);
    if (!confirmed || confirmed.facilityId === null) {
      return;
    }
    const resp = await this.api.removeFacility(this.state.scenario, confirmed.facilityId);
    this.state.pins = this.state.pins.filter((p) => p !== confirmed);
    if (this.accept(resp.revision)) {
      this.state.sdr = resp.sdr;
    }
    await this.refresh();
  }

  /** Hover readout from already-fetched layers (no client-side math). */
  async hover(x: number, y: number): Promise<CellReadout | null> {
    if (!this.state.grid || !this.runInfo) {
      return null;
    }
    const base = this.state.grid;
    const col = Math.floor((x - base.xll) / base.cellsize);
    const row = base.nrows - 1 - Math.floor((y - base.yll) / base.cellsize);
    if (row < 0 || row >= base.nrows || col < 0 || col >= base.ncols) {
      this.state.readout = null;
      this.notify();
      return null;
    }
    const at = (g: GridJson): number | null => {
      const v = g.values[row * g.ncols + col];
      return v === g.nodata ? null : v;
    };
    const score = await this.fetchLayer("score");
    const klass = await this.fetchLayer("class");
    const criteria: Record<string, number> = {};
    for (const name of this.runInfo.criteria) {
      const grid = await this.fetchLayer(name);
      if (grid) {
        const v = at(grid);
        if (v !== null) {
          criteria[name] = v;
        }
      }
    }
    this.state.readout = {
      x,
      y,
      score: score ? at(score) : null,
      classLabel: klass ? at(klass) : null,
      criteria,
    };
    this.notify();
    return this.state.readout;
  }
}
