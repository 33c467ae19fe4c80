// Grid JSON -> RGBA pixel buffer. Pure, canvas-free, testable in node.

import type { GridJson } from "./types.js";

export type Rgba = [number, number, number, number];

// 0 = not, 1 = somewhat, 2 = suitable, 3 = highly suitable
export const CLASS_PALETTE: Rgba[] = [
  [215, 48, 39, 255],
  [254, 224, 139, 255],
  [145, 207, 96, 255],
  [26, 152, 80, 255],
];

// continuous ramp endpoints for score/SDR layers
export const RAMP_LOW: Rgba = [49, 54, 149, 255];
export const RAMP_HIGH: Rgba = [255, 255, 191, 255];

export class GridFormatError extends Error {}

export function validateGrid(grid: GridJson): void {
  if (
    !Number.isInteger(grid.ncols) ||
    !Number.isInteger(grid.nrows) ||
    grid.ncols <= 0 ||
    grid.nrows <= 0
  ) {
    throw new GridFormatError("grid dimensions must be positive integers");
  }
  if (!Array.isArray(grid.values) || grid.values.length !== grid.ncols * grid.nrows) {
    throw new GridFormatError(
      `expected ${grid.ncols * grid.nrows} values, got ${grid.values?.length ?? 0}`,
    );
  }
  if (!(grid.cellsize > 0)) {
    throw new GridFormatError("cellsize must be positive");
  }
}

function lerp(a: Rgba, b: Rgba, t: number): Rgba {
  return [
    Math.round(a[0] + (b[0] - a[0]) * t),
    Math.round(a[1] + (b[1] - a[1]) * t),
    Math.round(a[2] + (b[2] - a[2]) * t),
    255,
  ];
}

export interface PixelGrid {
  width: number;
  height: number;
  data: Uint8ClampedArray<ArrayBuffer>; // RGBA, one pixel per cell
  liveCells: number;
}

function rgbaBuffer(cells: number): Uint8ClampedArray<ArrayBuffer> {
  return new Uint8ClampedArray(new ArrayBuffer(cells * 4));
}

/** Color a class grid: fixed 4-class palette, nodata transparent. */
export function classGridToPixels(grid: GridJson): PixelGrid {
  validateGrid(grid);
  const data = rgbaBuffer(grid.values.length);
  let live = 0;
  grid.values.forEach((v, i) => {
    if (v === grid.nodata || v < 0 || v > 3) {
      return; // transparent
    }
    const color = CLASS_PALETTE[Math.trunc(v)];
    data.set(color, i * 4);
    live += 1;
  });
  return { width: grid.ncols, height: grid.nrows, data, liveCells: live };
}

/** Color a continuous grid with a min-max ramp; nodata transparent. */
export function continuousGridToPixels(grid: GridJson): PixelGrid {
  validateGrid(grid);
  const liveValues = grid.values.filter((v) => v !== grid.nodata);
  const lo = Math.min(...liveValues);
  const hi = Math.max(...liveValues);
  const span = hi > lo ? hi - lo : 1;
  const data = rgbaBuffer(grid.values.length);
  let live = 0;
  grid.values.forEach((v, i) => {
    if (v === grid.nodata) {
      return;
    }
    data.set(lerp(RAMP_LOW, RAMP_HIGH, (v - lo) / span), i * 4);
    live += 1;
  });
  return { width: grid.ncols, height: grid.nrows, data, liveCells: live };
}

export function gridToPixels(grid: GridJson, layer: string): PixelGrid {
  return layer === "class" ? classGridToPixels(grid) : continuousGridToPixels(grid);
}

/** Cell under a map-unit coordinate, or null outside the grid. */
export function pointToCell(
  grid: GridJson,
  x: number,
  y: number,
): { row: number; col: number } | null {
  const col = Math.floor((x - grid.xll) / grid.cellsize);
  const row = grid.nrows - 1 - Math.floor((y - grid.yll) / grid.cellsize);
  if (row < 0 || row >= grid.nrows || col < 0 || col >= grid.ncols) {
    return null;
  }
  return { row, col };
}

export function cellValue(grid: GridJson, row: number, col: number): number {
  return grid.values[row * grid.ncols + col];
}

/** Map-unit coordinates of a cell center. */
export function cellCenter(
  grid: GridJson,
  row: number,
  col: number,
): { x: number; y: number } {
  return {
    x: grid.xll + (col + 0.5) * grid.cellsize,
    y: grid.yll + (grid.nrows - row - 0.5) * grid.cellsize,
  };
}
