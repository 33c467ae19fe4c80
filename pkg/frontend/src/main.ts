// Browser wiring: service URL input, layer picker, heatmap with
// click-to-place, SDR readout, live rank table, weight chart.

import { ApiClient } from "./api.js";
import { GridFormatError } from "./grid.js";
import { canvasToMap, renderMap } from "./heatmap.js";
import { ScenarioView } from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function renderRankTable(view: ScenarioView): void {
  const tbody = el<HTMLTableSectionElement>("rank-body");
  tbody.replaceChildren(
    ...view.state.ranked.slice(0, 15).map((r) => {
      const tr = document.createElement("tr");
      tr.innerHTML =
        `<td>${r.rank}</td><td>${r.id}</td>` +
        `<td>${r.score.toFixed(4)}</td><td>${r.class ?? "-"}</td>`;
      return tr;
    }),
  );
}

function renderWeights(view: ScenarioView): void {
  if (!view.runInfo) {
    return;
  }
  const box = el<HTMLDivElement>("weights");
  box.replaceChildren(
    ...Object.entries(view.runInfo.weights).map(([name, w]) => {
      const row = document.createElement("div");
      row.className = "wrow";
      row.innerHTML =
        `<span class="wname">${name}</span>` +
        `<span class="wbar" style="width:${Math.round(w * 300)}px"></span>` +
        `<span>${w.toFixed(3)}</span>`;
      return row;
    }),
  );
}

function renderSdr(view: ScenarioView): void {
  const tbody = el<HTMLTableSectionElement>("sdr-body");
  tbody.replaceChildren(
    ...view.state.sdr.map((row) => {
      const tr = document.createElement("tr");
      tr.innerHTML =
        `<td>${row.county_id}</td>` +
        `<td>${row.defined && row.sdr !== null ? row.sdr.toFixed(3) : "undefined"}</td>`;
      return tr;
    }),
  );
}

function renderToasts(view: ScenarioView): void {
  const box = el<HTMLDivElement>("toasts");
  box.replaceChildren(
    ...view.state.toasts.slice(-3).map((t) => {
      const div = document.createElement("div");
      div.className = "toast";
      div.textContent = t;
      return div;
    }),
  );
}

async function boot(): Promise<void> {
  const canvas = el<HTMLCanvasElement>("map");
  const banner = el<HTMLDivElement>("banner");
  const base = (el<HTMLInputElement>("service-url").value || "").replace(/\/$/, "");
  const view = new ScenarioView(new ApiClient(base));

  view.onChange(() => {
    banner.textContent = "";
    if (view.state.grid) {
      try {
        const result = renderMap(canvas, view.state.grid, view.state.layer, view.state.pins);
        if (result.liveCells === 0) {
          banner.textContent = "layer is entirely nodata";
        }
      } catch (err) {
        if (err instanceof GridFormatError) {
          banner.textContent = `bad grid: ${err.message}`;
        } else {
          throw err;
        }
      }
    }
    el<HTMLSpanElement>("revision").textContent = String(view.state.revision);
    renderRankTable(view);
    renderWeights(view);
    renderSdr(view);
    renderToasts(view);
    const r = view.state.readout;
    el<HTMLDivElement>("readout").textContent = r
      ? `score ${r.score?.toFixed(4) ?? "-"} class ${r.classLabel ?? "-"} ` +
        Object.entries(r.criteria)
          .map(([k, v]) => `${k}=${v.toFixed(3)}`)
          .join(" ")
      : "";
  });

  await view.init();

  el<HTMLSelectElement>("layer").onchange = (ev) => {
    void view.selectLayer((ev.target as HTMLSelectElement).value);
  };
  el<HTMLButtonElement>("undo").onclick = () => void view.undoLast();

  canvas.onclick = (ev) => {
    if (!view.state.grid) {
      return;
    }
    const rect = canvas.getBoundingClientRect();
    const pos = canvasToMap(canvas, view.state.grid, ev.clientX - rect.left, ev.clientY - rect.top);
    if (pos) {
      void view.place(pos.x, pos.y);
    }
  };
  canvas.onmousemove = (ev) => {
    if (!view.state.grid) {
      return;
    }
    const rect = canvas.getBoundingClientRect();
    const pos = canvasToMap(canvas, view.state.grid, ev.clientX - rect.left, ev.clientY - rect.top);
    if (pos) {
      void view.hover(pos.x, pos.y);
    }
  };

  if (view.runInfo) {
    const select = el<HTMLSelectElement>("layer");
    for (const name of view.runInfo.criteria) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      select.appendChild(opt);
    }
  }
}

el<HTMLButtonElement>("connect").onclick = () => {
  void boot().catch((err) => {
    el<HTMLDivElement>("banner").textContent = `connection failed: ${err}`;
  });
};
