// Canvas rendering: blit the cell pixel buffer scaled up, then overlay
// facility pins. Throws before touching the canvas on malformed grids, so
// a render error never leaves a partial frame.

import { gridToPixels } from "./grid.js";
import type { GridJson } from "./types.js";
import type { Pin } from "./state.js";

export interface RenderResult {
  liveCells: number;
}

export function renderMap(
  canvas: HTMLCanvasElement,
  grid: GridJson,
  layer: string,
  pins: Pin[] = [],
): RenderResult {
  const pixels = gridToPixels(grid, layer); // validates; may throw
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    throw new Error("canvas 2d context unavailable");
  }
  const cell = Math.max(
    1,
    Math.floor(Math.min(canvas.width / grid.ncols, canvas.height / grid.nrows)),
  );
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const off = new OffscreenCanvas(pixels.width, pixels.height);
  const offCtx = off.getContext("2d")!;
  offCtx.putImageData(new ImageData(pixels.data, pixels.width, pixels.height), 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, grid.ncols * cell, grid.nrows * cell);

  for (const pin of pins) {
    const col = (pin.x - grid.xll) / grid.cellsize;
    const row = grid.nrows - (pin.y - grid.yll) / grid.cellsize;
    ctx.beginPath();
    ctx.arc(col * cell, row * cell, Math.max(3, cell * 0.6), 0, 2 * Math.PI);
    ctx.fillStyle = pin.facilityId === null ? "rgba(30,30,30,0.5)" : "#111";
    ctx.fill();
    ctx.strokeStyle = "#fff";
    ctx.stroke();
  }
  return { liveCells: pixels.liveCells };
}

/** Canvas pixel position -> map units, for click-to-place. */
export function canvasToMap(
  canvas: HTMLCanvasElement,
  grid: GridJson,
  px: number,
  py: number,
): { x: number; y: number } | null {
  const cell = Math.max(
    1,
    Math.floor(Math.min(canvas.width / grid.ncols, canvas.height / grid.nrows)),
  );
  const col = px / cell;
  const row = py / cell;
  if (col < 0 || col >= grid.ncols || row < 0 || row >= grid.nrows) {
    return null;
  }
  return {
    x: grid.xll + col * grid.cellsize,
    y: grid.yll + (grid.nrows - row) * grid.cellsize,
  };
}
