import { describe, expect, it } from "vitest";

import {
  CLASS_PALETTE,
  GridFormatError,
  RAMP_HIGH,
  RAMP_LOW,
  cellCenter,
  classGridToPixels,
  continuousGridToPixels,
  pointToCell,
  validateGrid,
} from "../src/grid.js";
import type { GridJson } from "../src/types.js";

function grid(values: number[], ncols: number, nrows: number, nodata = -1): GridJson {
  return { ncols, nrows, xll: 0, yll: 0, cellsize: 10, nodata, values };
}

function pixel(data: Uint8ClampedArray, i: number): number[] {
  return [data[i * 4], data[i * 4 + 1], data[i * 4 + 2], data[i * 4 + 3]];
}

describe("class grid rendering", () => {
  it("maps a 2x2 class grid to four distinct palette colors in order", () => {
    const out = classGridToPixels(grid([3, 2, 1, 0], 2, 2));
    expect(pixel(out.data, 0)).toEqual([...CLASS_PALETTE[3]]);
    expect(pixel(out.data, 1)).toEqual([...CLASS_PALETTE[2]]);
    expect(pixel(out.data, 2)).toEqual([...CLASS_PALETTE[1]]);
    expect(pixel(out.data, 3)).toEqual([...CLASS_PALETTE[0]]);
    const seen = new Set([0, 1, 2, 3].map((i) => pixel(out.data, i).join(",")));
    expect(seen.size).toBe(4);
    expect(out.liveCells).toBe(4);
  });

  it("renders an all-nodata grid fully transparent", () => {
    const out = classGridToPixels(grid([-1, -1, -1, -1], 2, 2));
    expect(out.liveCells).toBe(0);
    for (let i = 0; i < 4; i += 1) {
      expect(pixel(out.data, i)[3]).toBe(0); // alpha 0
    }
  });

  it("keeps nodata cells transparent among live ones", () => {
    const out = classGridToPixels(grid([3, -1], 2, 1));
    expect(pixel(out.data, 0)[3]).toBe(255);
    expect(pixel(out.data, 1)[3]).toBe(0);
  });
});

describe("continuous grid rendering", () => {
  it("hits the ramp endpoints at the grid min and max", () => {
    const out = continuousGridToPixels(grid([0.2, 0.5, 0.9], 3, 1, -9999));
    expect(pixel(out.data, 0)).toEqual([...RAMP_LOW]);
    expect(pixel(out.data, 2)).toEqual([...RAMP_HIGH]);
  });

  it("renders constant live values without dividing by zero", () => {
    const out = continuousGridToPixels(grid([5, 5], 2, 1, -9999));
    expect(pixel(out.data, 0)).toEqual([...RAMP_LOW]);
    expect(out.liveCells).toBe(2);
  });
});

describe("grid validation", () => {
  it("rejects cell-count mismatches before any rendering", () => {
    expect(() => validateGrid(grid([1, 2, 3], 2, 2))).toThrow(GridFormatError);
    expect(() => classGridToPixels(grid([1, 2, 3], 2, 2))).toThrow(/expected 4 values/);
  });

  it("rejects non-positive dimensions and cellsize", () => {
    expect(() => validateGrid(grid([], 0, 1))).toThrow(GridFormatError);
    const bad = grid([1], 1, 1);
    bad.cellsize = 0;
    expect(() => validateGrid(bad)).toThrow(/cellsize/);
  });
});

describe("coordinate mapping", () => {
  it("round-trips cell centers through pointToCell", () => {
    const g = grid(new Array(12).fill(0), 4, 3);
    for (let row = 0; row < 3; row += 1) {
      for (let col = 0; col < 4; col += 1) {
        const { x, y } = cellCenter(g, row, col);
        expect(pointToCell(g, x, y)).toEqual({ row, col });
      }
    }
  });

  it("returns null outside the grid", () => {
    const g = grid(new Array(4).fill(0), 2, 2);
    expect(pointToCell(g, -1, 5)).toBeNull();
    expect(pointToCell(g, 25, 5)).toBeNull();
  });
});
