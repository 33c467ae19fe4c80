"""HTTP scenario service over a frozen pipeline run.

The base run is immutable; scenarios live in memory as facility deltas over
it. Every response carries the scenario revision so clients can discard
stale reads. Mutations serialize per scenario; reads take a consistent
(revision, state) snapshot.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import pipeline
from .geocore import Facility, RasterLayer
from .sdr import hypothetical_facility


@dataclass
class Scenario:
    id: str
    added: dict[int, Facility] = field(default_factory=dict)
    removed: set[int] = field(default_factory=set)
    revision: int = 0
    state: pipeline.ScenarioState | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


class ScenarioStore:
    def __init__(self, ctx: pipeline.FrozenContext):
        self.ctx = ctx
        self.base_state = pipeline.scenario_state(ctx)
        self.registry_lock = threading.Lock()
        self.scenarios: dict[str, Scenario] = {}
        self._next_scenario = 1
        self._next_facility = max(
            [f.id for f in ctx.region.facilities], default=0) + 1

    # -- scenario lifecycle -------------------------------------------------

    def create(self) -> Scenario:
        with self.registry_lock:
            sid = f"s{self._next_scenario}"
            self._next_scenario += 1
            sc = Scenario(id=sid, state=self.base_state)
            self.scenarios[sid] = sc
            return sc

    def delete(self, sid: str) -> None:
        with self.registry_lock:
            if sid not in self.scenarios:
                raise KeyError(sid)
            del self.scenarios[sid]

    def get(self, sid: str) -> Scenario:
        if sid == "base":
            return Scenario(id="base", state=self.base_state)
        with self.registry_lock:
            try:
                return self.scenarios[sid]
            except KeyError:
                raise KeyError(sid) from None

    def snapshot(self, sid: str):
        sc = self.get(sid)
        return sc.revision, sc.state

    # -- mutations ----------------------------------------------------------

    def add_facility(self, sid: str, x: float, y: float, demand: float):
        sc = self.get(sid)
        if sc.id == "base":
            raise PermissionError("the base scenario is immutable")
        with sc.lock:
            with self.registry_lock:
                fid = self._next_facility
                self._next_facility += 1
            fac = hypothetical_facility(self.ctx.region, x, y, demand, fid=fid)
            added = dict(sc.added)
            added[fid] = fac
            state = pipeline.scenario_state(
                self.ctx, add=list(added.values()), remove_ids=sc.removed)
            sc.added = added
            sc.state = state
            sc.revision += 1
            return fid, sc.revision, state

    def remove_facility(self, sid: str, fid: int):
        sc = self.get(sid)
        if sc.id == "base":
            raise PermissionError("the base scenario is immutable")
        with sc.lock:
            added = dict(sc.added)
            removed = set(sc.removed)
            if fid in added:
                del added[fid]
            elif any(f.id == fid for f in self.ctx.region.facilities):
                removed.add(fid)
            else:
                raise KeyError(f"facility {fid} does not exist")
            state = pipeline.scenario_state(
                self.ctx, add=list(added.values()), remove_ids=removed)
            sc.added = added
            sc.removed = removed
            sc.state = state
            sc.revision += 1
            return sc.revision, state


# ---------------------------------------------------------------------------
# JSON encoding
# ---------------------------------------------------------------------------

def grid_json(layer: RasterLayer, as_int: bool = False,
              nodata: float | None = None) -> dict:
    h = layer.header
    sentinel = h.nodata if nodata is None else nodata
    cells = layer.cells
    if as_int:
        values = []
        for v in cells.ravel():
            values.append(int(sentinel) if v == h.nodata else int(v))
        sentinel = int(sentinel)
    else:
        values = [float(v) for v in cells.ravel()]
    return {"ncols": h.ncols, "nrows": h.nrows, "xll": h.xll, "yll": h.yll,
            "cellsize": h.cellsize, "nodata": sentinel, "values": values}


def _ranked_json(ranked) -> list[dict]:
    return [{"rank": r.rank, "id": r.id, "x": r.x, "y": r.y,
             "score": r.score, "class": r.class_label} for r in ranked]


def _sdr_json(state: pipeline.ScenarioState) -> list[dict]:
    t = state.sdr_table
    out = []
    for j, cid in enumerate(t.county_ids):
        out.append({"county_id": int(cid), "supply": float(t.supply[j]),
                    "existing_demand": float(t.existing_demand[j]),
                    "d_new_share": float(t.d_new_share[j]),
                    "sdr": float(t.sdr[j]) if t.defined[j] else None,
                    "defined": bool(t.defined[j])})
    return out


# ---------------------------------------------------------------------------
# HTTP plumbing
# ---------------------------------------------------------------------------

_ROUTES = [
    ("GET", re.compile(r"^/api/run$"), "run_info"),
    ("GET", re.compile(r"^/api/map$"), "map_layer"),
    ("POST", re.compile(r"^/api/scenario$"), "create_scenario"),
    ("DELETE", re.compile(r"^/api/scenario/(?P<sid>[^/]+)$"), "delete_scenario"),
    ("POST", re.compile(r"^/api/scenario/(?P<sid>[^/]+)/facilities$"),
     "add_facility"),
    ("DELETE",
     re.compile(r"^/api/scenario/(?P<sid>[^/]+)/facilities/(?P<fid>\d+)$"),
     "remove_facility"),
    ("POST", re.compile(r"^/api/rank$"), "rank"),
    ("GET", re.compile(r"^/api/validation$"), "validation"),
]


class Handler(BaseHTTPRequestHandler):
    store: ScenarioStore  # set by serve()

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _send(self, code: int, payload: dict) -> None:
        body = json.dumps(payload).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> dict:
        length = int(self.headers.get("Content-Length", 0))
        if not length:
            return {}
        return json.loads(self.rfile.read(length))

    def _dispatch(self, method: str) -> None:
        path, _, query = self.path.partition("?")
        params = {}
        if query:
            for pair in query.split("&"):
                k, _, v = pair.partition("=")
                params[k] = v
        for verb, pattern, name in _ROUTES:
            if verb != method:
                continue
            m = pattern.match(path)
            if m:
                try:
                    getattr(self, name)(params, m.groupdict())
                except KeyError as exc:
                    self._send(404, {"error": f"not found: {exc}"})
                except PermissionError as exc:
                    self._send(403, {"error": str(exc)})
                except (ValueError, TypeError) as exc:
                    self._send(400, {"error": str(exc)})
                except Exception as exc:  # noqa: BLE001
                    self._send(500, {"error": str(exc)})
                return
        self._send(404, {"error": f"no route for {method} {path}"})

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    # -- handlers -------------------------------------------------------

    def run_info(self, params, _groups):
        ctx = self.store.ctx
        self._send(200, {
            "run_id": ctx.run_id,
            "best_kind": ctx.best_kind,
            "criteria": list(ctx.weights.names),
            "weights": ctx.weights.as_dict(),
            "per_model_weights": ctx.per_model_weights,
            "breaks": list(ctx.breaks),
            "radius": ctx.region.radius,
            "d_new": ctx.d_new,
            "facilities": [{"id": f.id, "x": f.x, "y": f.y,
                            "demand": f.demand_tons_per_year,
                            "status": f.status}
                           for f in ctx.region.facilities],
            "candidates": [{"id": c.id, "x": c.x, "y": c.y}
                           for c in ctx.region.candidates],
            "revision": 0})

    def map_layer(self, params, _groups):
        sid = params.get("scenario", "base")
        layer_name = params.get("layer", "score")
        revision, state = self.store.snapshot(sid)
        if layer_name == "score":
            grid = grid_json(state.map.score)
        elif layer_name == "class":
            grid = grid_json(state.map.klass, as_int=True, nodata=-1)
        elif layer_name == "sdr":
            grid = grid_json(state.sdr_raw)
        elif layer_name in state.criteria.names:
            grid = grid_json(state.criteria.layer(layer_name))
        else:
            raise ValueError(f"unknown layer {layer_name!r}")
        self._send(200, {"scenario": sid, "revision": revision,
                         "layer": layer_name, "grid": grid})

    def create_scenario(self, _params, _groups):
        sc = self.store.create()
        self._send(200, {"scenario": sc.id, "revision": sc.revision})

    def delete_scenario(self, _params, groups):
        self.store.delete(groups["sid"])
        self._send(200, {"deleted": groups["sid"]})

    def add_facility(self, _params, groups):
        body = self._body()
        for key in ("x", "y"):
            if key not in body:
                raise ValueError(f"missing field {key!r}")
        demand = float(body.get("demand", self.store.ctx.d_new))
        fid, revision, state = self.store.add_facility(
            groups["sid"], float(body["x"]), float(body["y"]), demand)
        self._send(200, {"scenario": groups["sid"], "revision": revision,
                         "facility_id": fid, "sdr": _sdr_json(state)})

    def remove_facility(self, _params, groups):
        revision, state = self.store.remove_facility(groups["sid"],
                                                     int(groups["fid"]))
        self._send(200, {"scenario": groups["sid"], "revision": revision,
                         "sdr": _sdr_json(state)})

    def rank(self, _params, _groups):
        body = self._body()
        sid = body.get("scenario", "base")
        revision, state = self.store.snapshot(sid)
        candidates = body.get("candidates")
        if candidates:
            from .geocore import CandidateSite

            sites = [CandidateSite(id=int(c.get("id", i + 1)),
                                   x=float(c["x"]), y=float(c["y"]))
                     for i, c in enumerate(candidates)]
            ranked, excluded = pipeline.rank_candidates(
                self.store.ctx.model, self.store.ctx.scaler, state.criteria,
                sites, top=body.get("top"), class_map=state.map)
        else:
            ranked = state.ranked
            excluded = state.excluded
            if body.get("top"):
                ranked = ranked[:int(body["top"])]
        self._send(200, {"scenario": sid, "revision": revision,
                         "ranked": _ranked_json(ranked),
                         "excluded": excluded})

    def validation(self, params, _groups):
        sid = params.get("scenario", "base")
        revision, state = self.store.snapshot(sid)
        if state.validation is None:
            raise ValueError("scenario has no existing facilities")
        self._send(200, {"scenario": sid, "revision": revision,
                         "validation": state.validation.to_dict()})


def serve(run_dir: str | Path, bind=("127.0.0.1", 8765)) -> ThreadingHTTPServer:
    """Load a finished run and return a ready (unstarted) HTTP server."""
    ctx = pipeline.load_context(run_dir)
    store = ScenarioStore(ctx)
    handler = type("BoundHandler", (Handler,), {"store": store})
    server = ThreadingHTTPServer(bind, handler)
    server.store = store
    return server
