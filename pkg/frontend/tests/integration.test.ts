// Live what-if loop against the real service (spawned by globalSetup).

import { beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ScenarioView } from "../src/state.js";

const baseUrl = () => process.env.SITEWISE_SERVICE_URL ?? "http://127.0.0.1:8917";

describe("what-if loop against the live service", () => {
  let api: ApiClient;

  beforeAll(() => {
    api = new ApiClient(baseUrl());
  });

  it("serves run metadata with tuned weights summing to one", async () => {
    const info = await api.runInfo();
    expect(info.criteria.length).toBe(7);
    const total = Object.values(info.weights).reduce((a, b) => a + b, 0);
    expect(Math.abs(total - 1)).toBeLessThan(1e-9);
  });

  it("place bumps revision, weakly decreases SDR, and mirrors service ranks; undo restores the view", async () => {
    const view = new ScenarioView(api);
    await view.init();
    expect(view.state.grid).not.toBeNull();

    const preRevision = view.state.revision;
    const preGrid = JSON.stringify(view.state.grid);
    const preRanked = JSON.stringify(view.state.ranked);
    const preSdr = await api.mapLayer(view.state.scenario, "sdr");

    const g = view.state.grid!;
    const x = g.xll + (g.ncols / 2) * g.cellsize;
    const y = g.yll + (g.nrows / 2) * g.cellsize;
    const pin = await view.place(x, y);
    expect(pin).not.toBeNull();
    expect(pin!.facilityId).not.toBeNull();
    expect(view.state.revision).toBeGreaterThan(preRevision);

    // SDR weakly decreases wherever defined (the entrant only adds demand)
    const postSdr = await api.mapLayer(view.state.scenario, "sdr");
    const before = preSdr.grid.values;
    const after = postSdr.grid.values;
    let decreasedSomewhere = false;
    after.forEach((v, i) => {
      const b = before[i];
      if (b !== preSdr.grid.nodata && v !== postSdr.grid.nodata) {
        expect(v).toBeLessThanOrEqual(b + 1e-9);
        if (v < b - 1e-12) {
          decreasedSomewhere = true;
        }
      }
    });
    expect(decreasedSomewhere).toBe(true);

    // rank table ordering equals the service response exactly
    const direct = await api.rank(view.state.scenario);
    expect(view.state.ranked.map((r) => [r.rank, r.id, r.score])).toEqual(
      direct.ranked.map((r) => [r.rank, r.id, r.score]),
    );

    // undo restores the pre-place view exactly
    await view.undoLast();
    expect(view.state.pins).toHaveLength(0);
    expect(JSON.stringify(view.state.grid)).toBe(preGrid);
    expect(JSON.stringify(view.state.ranked)).toBe(preRanked);
    const restoredSdr = await api.mapLayer(view.state.scenario, "sdr");
    expect(restoredSdr.grid).toEqual(preSdr.grid);
  });

  it("reads per-criterion values for the hover readout from the service", async () => {
    const view = new ScenarioView(api);
    await view.init();
    const g = view.state.grid!;
    const readout = await view.hover(
      g.xll + 1.5 * g.cellsize,
      g.yll + 1.5 * g.cellsize,
    );
    expect(readout).not.toBeNull();
    expect(Object.keys(readout!.criteria).length).toBe(7);
    expect(readout!.score).not.toBeNull();
  });

  it("rejects mutations of the base scenario", async () => {
    await expect(api.addFacility("base", 0, 0, 1)).rejects.toThrow(/immutable/);
  });
});
