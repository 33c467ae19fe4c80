"""End-to-end orchestration of the four phases.

Phase 1 builds the equal-weight initial map and samples labeled points;
phase 2 splits, rebalances, optionally grid-searches, and trains the five
classifier kinds; phase 3 computes exact Shapley attributions per model,
renormalizes them into tuned weights, rebuilds per-model maps with Jenks
breaks, resamples and retrains; phase 4 picks the best model, validates the
map against existing facilities, and ranks candidates.

Scenario updates freeze the tuned weights, breaks, model, and the SDR
normalization range from the base run, so a what-if facility change only
recomputes the SDR layer, the overlay, and the ranking.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import geocore, learn, regionio, sdr, synth
from .criteria import CriteriaSet, build_criteria
from .explain import average_weights, exact_shapley, shap_to_weights
from .geocore import CandidateSite, RasterLayer, RegionModel
from .learn import StandardScaler, default_grid, evaluate, grid_search, smote_enn
from .overlay import (SampleSet, SuitabilityMap, WeightVector, classify_map,
                      equal_interval_breaks, jenks_partition, relabel,
                      sample_points, split, top_up, weighted_sum)

KIND_ORDER = ("random_forest", "gbt", "svc", "logistic", "knn")


class PipelineError(RuntimeError):
    def __init__(self, phase: str, cause: BaseException):
        super().__init__(f"pipeline failed in {phase}: {cause}")
        self.phase = phase
        self.cause = cause


@dataclass
class PipelineConfig:
    seed: int = 0
    region_dir: str | None = None
    # synthetic generation (used when region_dir is unset)
    ncols: int = 100
    nrows: int = 100
    n_counties: int = 6
    n_facilities: int = 4
    n_candidates: int = 150
    cellsize: float = 1000.0
    radius: float | None = None
    planted_weights: list[float] | None = None
    facility_placement: str = "random"
    # sampling and labeling
    n_samples: int = 2000
    topup: int = 300
    train_frac: float = 0.8
    label_source: str = "map"  # "map" | "ground_truth"
    # rebalancing
    k_smote: int = 5
    k_enn: int = 3
    # training
    grid_search: bool = True
    cv_folds: int = 5
    model_kinds: tuple[str, ...] = KIND_ORDER
    # attribution
    shap_samples: int = 32
    shap_background: int = 64
    weight_mode: str = "per_model"  # "per_model" | "averaged"
    # supply-demand ratio
    d_new: float | None = None
    new_alloc: str = "radius"
    # retuning
    retune_iterations: int = 1
    converge_tol: float = 1e-3
    selection_metric: str = "auc"
    threads: int = 0

    def to_text(self) -> str:
        lines = []
        for key, value in sorted(asdict(self).items()):
            lines.append(f"{key} = {_cfg_fmt(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PipelineConfig":
        values = {}
        for line_no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {line_no}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key] = _cfg_parse(val)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "model_kinds" in values:
            values["model_kinds"] = tuple(values["model_kinds"])
        return cls(**values)

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        return cls.from_text(Path(path).read_text())


def _cfg_fmt(value) -> str:
    if value is None:
        return '""'
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_cfg_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot format config value {value!r}")


def _cfg_parse(token: str):
    token = token.strip()
    if token in ("true", "false"):
        return token == "true"
    if token.startswith('"') and token.endswith('"'):
        inner = token[1:-1]
        return None if inner == "" else inner
    if token.startswith("[") and token.endswith("]"):
        inner = token[1:-1].strip()
        if not inner:
            return []
        return [_cfg_parse(t) for t in inner.split(",")]
    try:
        return int(token)
    except ValueError:
        return float(token)


@dataclass
class ValidationReport:
    counts: np.ndarray       # (4,) facilities per class
    percentages: np.ndarray  # (4,) over defined-class facilities
    nodata_count: int
    total: int

    def to_dict(self) -> dict:
        return {"counts": self.counts.tolist(),
                "percentages": self.percentages.tolist(),
                "nodata_count": self.nodata_count, "total": self.total}

    @classmethod
    def from_dict(cls, d: dict) -> "ValidationReport":
        return cls(np.asarray(d["counts"], np.int64),
                   np.asarray(d["percentages"], np.float64),
                   d["nodata_count"], d["total"])


@dataclass
class RankedCandidate:
    rank: int
    id: int
    x: float
    y: float
    score: float
    class_label: int | None


@dataclass
class ModelArtifacts:
    kind: str
    params: dict
    eval_initial: learn.EvaluationReport
    shap_report: object
    shap_mean_abs: np.ndarray
    weights: WeightVector
    map: SuitabilityMap
    samples: SampleSet
    scaler: StandardScaler
    model: object
    eval_final: learn.EvaluationReport


@dataclass
class PipelineRun:
    config: PipelineConfig
    bundle: regionio.RegionBundle
    sdr_table: sdr.SdrTable
    d_new: float
    sdr_norm: tuple[float, float]
    criteria: CriteriaSet
    initial_weights: WeightVector
    initial_map: SuitabilityMap
    samples: SampleSet
    models: dict[str, ModelArtifacts]
    best_kind: str
    validation: ValidationReport
    ranked: list[RankedCandidate]
    excluded: list[int]
    provenance: dict = field(default_factory=dict)

    @property
    def region(self) -> RegionModel:
        return self.bundle.region

    @property
    def best(self) -> ModelArtifacts:
        return self.models[self.best_kind]


# ---------------------------------------------------------------------------
# Phase helpers
# ---------------------------------------------------------------------------

def _load_or_generate(config: PipelineConfig) -> regionio.RegionBundle:
    if config.region_dir:
        return regionio.load_region(config.region_dir)
    from .criteria import CANONICAL_CRITERIA

    names = tuple(n for n, _ in CANONICAL_CRITERIA)
    if config.planted_weights:
        planted = WeightVector(names, np.asarray(config.planted_weights))
    else:
        planted = WeightVector.equal(names)
    return synth.make_bundle(
        config.seed, planted, ncols=config.ncols, nrows=config.nrows,
        n_counties=config.n_counties, n_facilities=config.n_facilities,
        n_candidates=config.n_candidates, cellsize=config.cellsize,
        radius=config.radius, facility_placement=config.facility_placement,
        d_new=config.d_new)


def _normalized_sdr_range(raw_sdr: RasterLayer) -> tuple[float, float]:
    live = raw_sdr.cells[raw_sdr.cells != raw_sdr.header.nodata]
    return float(live.min()), float(live.max())


def _train_test(samples: SampleSet, config: PipelineConfig, seed: int):
    tagged = split(samples, config.train_frac, seed)
    train, test = tagged.train(), tagged.test()
    scaler = StandardScaler().fit(train.features)
    Xtr = scaler.transform(train.features)
    Xte = scaler.transform(test.features)
    Xb, yb = smote_enn(Xtr, train.label, k_smote=config.k_smote,
                       k_enn=config.k_enn, seed=seed + 1)
    return tagged, scaler, Xb, yb, Xte, test.label, Xtr, train.label


def validate_against_existing(m: SuitabilityMap,
                              region: RegionModel) -> ValidationReport:
    m.classified()
    existing = region.existing_facilities()
    if not existing:
        raise ValueError("region has no existing facilities to validate against")
    counts = np.zeros(4, np.int64)
    nodata_count = 0
    for fac in existing:
        rc = m.klass.header.point_to_cell(fac.x, fac.y)
        if rc is None:
            nodata_count += 1
            continue
        v = m.klass.cells[rc]
        if v == m.klass.header.nodata:
            nodata_count += 1
        else:
            counts[int(v)] += 1
    defined = counts.sum()
    pct = 100.0 * counts / defined if defined else np.zeros(4)
    return ValidationReport(counts=counts, percentages=pct,
                            nodata_count=nodata_count, total=len(existing))


def rank_candidates(model, scaler: StandardScaler, criteria: CriteriaSet,
                    candidates, top: int | None = None,
                    class_map: SuitabilityMap | None = None):
    """Candidates ordered by descending highly-suitable probability.

    Returns (ranked list, excluded candidate ids). Candidates outside the
    grid or on nodata cells are excluded.
    """
    hdr = criteria.header
    rows, cols, kept = [], [], []
    excluded = []
    for cand in candidates:
        rc = hdr.point_to_cell(cand.x, cand.y)
        if rc is None:
            excluded.append(cand.id)
            continue
        feats = criteria.features_at(np.array([rc[0]]), np.array([rc[1]]))
        if (feats == hdr.nodata).any():
            excluded.append(cand.id)
            continue
        rows.append(rc[0])
        cols.append(rc[1])
        kept.append(cand)
    if not kept:
        return [], excluded
    feats = criteria.features_at(np.asarray(rows), np.asarray(cols))
    proba = model.predict_proba(scaler.transform(feats))
    scores = proba[:, 3]
    order = sorted(range(len(kept)), key=lambda i: (-scores[i], kept[i].id))
    if top is not None:
        order = order[:top]
    ranked = []
    for rank, i in enumerate(order, 1):
        cand = kept[i]
        label = None
        if class_map is not None and class_map.klass is not None:
            v = class_map.klass.cells[rows[i], cols[i]]
            label = None if v == class_map.klass.header.nodata else int(v)
        ranked.append(RankedCandidate(rank=rank, id=cand.id, x=cand.x,
                                      y=cand.y, score=float(scores[i]),
                                      class_label=label))
    return ranked, excluded


# ---------------------------------------------------------------------------
# The run itself
# ---------------------------------------------------------------------------

def run(config: PipelineConfig, out_dir: str | Path | None = None) -> PipelineRun:
    started = time.time()
    try:
        bundle = _load_or_generate(config)
        region = bundle.region
        d_new = config.d_new if config.d_new is not None else sdr.default_d_new(region)
        sdr_table = sdr.compute_sdr(region, d_new=d_new,
                                    new_alloc=config.new_alloc)
        raw = regionio.build_raw_layers(region, bundle.masks,
                                        rate_layers=bundle.rate_layers,
                                        sdr_table=sdr_table)
        criteria = build_criteria(raw, bundle.rules)
        sdr_norm = _normalized_sdr_range(raw["sdr"])
    except Exception as exc:  # noqa: BLE001
        raise PipelineError("phase0-inputs", exc) from exc

    names = criteria.names
    try:
        w0 = WeightVector.equal(names)
        initial_scores = weighted_sum(criteria, w0)
        if config.label_source == "ground_truth":
            if bundle.ground_truth is None:
                raise ValueError("label_source=ground_truth needs a "
                                 "ground_truth raster")
            label_map = SuitabilityMap(score=bundle.ground_truth)
        elif config.label_source == "map":
            label_map = initial_scores
        else:
            raise ValueError(f"unknown label_source {config.label_source!r}")
        samples = sample_points(label_map, criteria, config.n_samples,
                                config.seed)
        samples = top_up(label_map, criteria, samples, config.topup,
                         config.seed + 1)
        init_breaks = equal_interval_breaks(
            initial_scores.score.cells[samples.rows, samples.cols])
        initial_map = classify_map(initial_scores, init_breaks, "equal")
    except PipelineError:
        raise
    except Exception as exc:  # noqa: BLE001
        raise PipelineError("phase1-initial-map", exc) from exc

    try:
        samples, scaler0, Xb, yb, Xte, yte, Xtr, ytr = _train_test(
            samples, config, config.seed + 2)
        phase2 = {}
        for kind in config.model_kinds:
            if config.grid_search:
                params, _ = grid_search(kind, Xb, yb,
                                        default_grid(kind, criteria.k),
                                        folds=config.cv_folds,
                                        seed=config.seed)
            else:
                params = {}
            model = learn.fit(kind, Xb, yb, params=params, seed=config.seed)
            phase2[kind] = (params, model, evaluate(model, Xte, yte))
    except Exception as exc:  # noqa: BLE001
        raise PipelineError("phase2-training", exc) from exc

    try:
        rng = np.random.default_rng(config.seed + 5)
        bg_n = min(config.shap_background, Xtr.shape[0])
        ex_n = min(config.shap_samples, Xte.shape[0])
        bg_idx = rng.choice(Xtr.shape[0], size=bg_n, replace=False)
        ex_idx = rng.choice(Xte.shape[0], size=ex_n, replace=False)
        background = Xtr[bg_idx]
        explain_rows = Xte[ex_idx]

        models: dict[str, ModelArtifacts] = {}
        reports = {}
        for kind in config.model_kinds:
            params, model, eval0 = phase2[kind]
            reports[kind] = exact_shapley(model, explain_rows, background,
                                          feature_names=names)
        per_model_weights = {kind: shap_to_weights(reports[kind], names)
                             for kind in config.model_kinds}
        if config.weight_mode == "averaged":
            avg = average_weights(per_model_weights.values())
            per_model_weights = {kind: avg for kind in config.model_kinds}
        elif config.weight_mode != "per_model":
            raise ValueError(f"unknown weight_mode {config.weight_mode!r}")

        for mi, kind in enumerate(config.model_kinds):
            params, model, eval0 = phase2[kind]
            weights = per_model_weights[kind]
            for it in range(max(1, config.retune_iterations)):
                scored = weighted_sum(criteria, weights)
                resample = sample_points(scored, criteria, config.n_samples,
                                         config.seed + 100 + mi)
                jb, _ = jenks_partition(resample.score)
                resample = relabel(resample, jb)
                tuned_map = classify_map(scored, jb, "jenks")
                resample, scaler_j, Xbj, ybj, Xtej, ytej, Xtrj, _ = _train_test(
                    resample, config, config.seed + 200 + mi)
                model_j = learn.fit(kind, Xbj, ybj, params=params,
                                    seed=config.seed)
                eval_j = evaluate(model_j, Xtej, ytej)
                if it + 1 >= max(1, config.retune_iterations):
                    break
                rep = exact_shapley(model_j, Xtej[:ex_n], Xtrj[:bg_n],
                                    feature_names=names)
                new_weights = shap_to_weights(rep, names)
                if np.max(np.abs(new_weights.weights
                                 - weights.weights)) < config.converge_tol:
                    break
                weights = new_weights
            models[kind] = ModelArtifacts(
                kind=kind, params=params, eval_initial=eval0,
                shap_report=reports[kind],
                shap_mean_abs=reports[kind].mean_abs(), weights=weights,
                map=tuned_map, samples=resample, scaler=scaler_j,
                model=model_j, eval_final=eval_j)
    except PipelineError:
        raise
    except Exception as exc:  # noqa: BLE001
        raise PipelineError("phase3-retuning", exc) from exc

    try:
        def sort_key(kind):
            art = models[kind]
            metric = (art.eval_final.auc_ovr
                      if config.selection_metric == "auc"
                      else getattr(art.eval_final, config.selection_metric))
            return (-metric, -art.eval_final.accuracy,
                    KIND_ORDER.index(kind) if kind in KIND_ORDER else 99)

        best_kind = sorted(models, key=sort_key)[0]
        best = models[best_kind]
        validation = validate_against_existing(best.map, region)
        ranked, excluded = rank_candidates(best.model, best.scaler, criteria,
                                           region.candidates,
                                           class_map=best.map)
    except Exception as exc:  # noqa: BLE001
        raise PipelineError("phase4-validation-ranking", exc) from exc

    run_obj = PipelineRun(
        config=config, bundle=bundle, sdr_table=sdr_table, d_new=d_new,
        sdr_norm=sdr_norm, criteria=criteria, initial_weights=w0,
        initial_map=initial_map, samples=samples, models=models,
        best_kind=best_kind, validation=validation, ranked=ranked,
        excluded=excluded,
        provenance={"seed": config.seed, "elapsed_s": time.time() - started})
    if out_dir is not None:
        save_run(run_obj, out_dir)
    return run_obj


# ---------------------------------------------------------------------------
# Scenario updates over a frozen run
# ---------------------------------------------------------------------------

@dataclass
class FrozenContext:
    region: RegionModel
    criteria: CriteriaSet
    weights: WeightVector
    breaks: tuple[float, float, float]
    model: object
    scaler: StandardScaler
    d_new: float
    new_alloc: str
    sdr_norm: tuple[float, float]
    best_kind: str
    per_model_weights: dict[str, dict[str, float]] = field(default_factory=dict)
    run_id: str = "base"


@dataclass
class ScenarioState:
    region: RegionModel
    sdr_table: sdr.SdrTable
    sdr_raw: RasterLayer
    criteria: CriteriaSet
    map: SuitabilityMap
    ranked: list[RankedCandidate]
    excluded: list[int]
    validation: ValidationReport | None


def context_from_run(run_obj: PipelineRun) -> FrozenContext:
    best = run_obj.best
    return FrozenContext(
        region=run_obj.region, criteria=run_obj.criteria,
        weights=best.weights, breaks=best.map.breaks, model=best.model,
        scaler=best.scaler, d_new=run_obj.d_new,
        new_alloc=run_obj.config.new_alloc, sdr_norm=run_obj.sdr_norm,
        best_kind=run_obj.best_kind,
        per_model_weights={k: a.weights.as_dict()
                           for k, a in run_obj.models.items()})


def scenario_state(ctx: FrozenContext, add=(), remove_ids=()) -> ScenarioState:
    """Pure function of the facility delta over the frozen context."""
    remove_ids = set(remove_ids)
    base_ids = {f.id for f in ctx.region.facilities}
    missing = remove_ids - base_ids - {f.id for f in add}
    if missing:
        raise ValueError(f"cannot remove unknown facility ids {sorted(missing)}")
    facilities = [f for f in ctx.region.facilities if f.id not in remove_ids]
    facilities += [f for f in add if f.id not in remove_ids]
    region = ctx.region.with_facilities(facilities)
    table = sdr.compute_sdr(region, d_new=ctx.d_new, new_alloc=ctx.new_alloc)
    raw_sdr = sdr.sdr_raster(table, region)

    lo, hi = ctx.sdr_norm
    hdr = raw_sdr.header
    cells = np.full_like(raw_sdr.cells, hdr.nodata)
    live = raw_sdr.cells != hdr.nodata
    scaled = (raw_sdr.cells[live] - lo) / (hi - lo)
    cells[live] = np.clip(scaled, 0.0, 1.0)
    sdr_layer = RasterLayer("sdr", hdr, cells)

    criteria = ctx.criteria.replace_layer("sdr", sdr_layer)
    scored = weighted_sum(criteria, ctx.weights)
    tuned = classify_map(scored, ctx.breaks, "jenks")
    ranked, excluded = rank_candidates(ctx.model, ctx.scaler, criteria,
                                       ctx.region.candidates, class_map=tuned)
    validation = None
    if region.existing_facilities():
        validation = validate_against_existing(tuned, region)
    return ScenarioState(region=region, sdr_table=table, sdr_raw=raw_sdr,
                         criteria=criteria, map=tuned, ranked=ranked,
                         excluded=excluded, validation=validation)


def scenario_update(run_obj: PipelineRun, add=(), remove_ids=()) -> ScenarioState:
    return scenario_state(context_from_run(run_obj), add=add,
                          remove_ids=remove_ids)


# ---------------------------------------------------------------------------
# Run directory persistence
# ---------------------------------------------------------------------------

def save_run(run_obj: PipelineRun, out_dir: str | Path) -> None:
    out = Path(out_dir)
    (out / "inputs").mkdir(parents=True, exist_ok=True)
    art = out / "artifacts"
    (art / "models").mkdir(parents=True, exist_ok=True)
    (art / "criteria").mkdir(parents=True, exist_ok=True)

    (out / "config.cfg").write_text(run_obj.config.to_text())
    regionio.save_region(run_obj.bundle, out / "inputs")

    for name, layer in zip(run_obj.criteria.names, run_obj.criteria.layers):
        geocore.save_raster(layer, art / "criteria" / f"{name}.asc")
    norm = {"sdr_norm_lo": run_obj.sdr_norm[0],
            "sdr_norm_hi": run_obj.sdr_norm[1], "d_new": run_obj.d_new}
    (art / "criteria" / "norm_params.json").write_text(
        json.dumps(norm, sort_keys=True))

    sdr.save_sdr_table(run_obj.sdr_table, art / "sdr_table.csv")
    geocore.save_raster(sdr.sdr_raster(run_obj.sdr_table, run_obj.region),
                        art / "sdr.asc")
    geocore.save_raster(run_obj.initial_map.score.with_cells(
        run_obj.initial_map.score.cells, "initial_score"),
        art / "initial_map_score.asc")
    geocore.save_raster(run_obj.initial_map.klass, art / "initial_map_class.asc")
    (art / "initial_breaks.json").write_text(
        json.dumps({"breaks": list(run_obj.initial_map.breaks),
                    "method": run_obj.initial_map.method}))
    run_obj.samples.save(art / "samples_phase1.csv")

    for kind, m in run_obj.models.items():
        m.weights.save(art / f"weights_{kind}.csv")
        geocore.save_raster(m.map.score, art / f"map_{kind}_score.asc")
        geocore.save_raster(m.map.klass, art / f"map_{kind}_class.asc")
        (art / f"breaks_{kind}.json").write_text(
            json.dumps({"breaks": list(m.map.breaks), "method": m.map.method}))
        m.samples.save(art / f"samples_{kind}.csv")
        if m.shap_report is not None:
            m.shap_report.save(art / f"shap_{kind}.csv")
        learn.save_model(m.model, art / "models" / f"{kind}.json",
                         scaler=m.scaler)
        payload = {"params": m.params,
                   "eval_initial": m.eval_initial.to_dict(),
                   "eval_final": m.eval_final.to_dict(),
                   "shap_mean_abs": m.shap_mean_abs.tolist()}
        (art / f"eval_{kind}.json").write_text(
            json.dumps(payload, sort_keys=True))
    _save_plot_data(run_obj, art)

    best = {"best_kind": run_obj.best_kind,
            "selection_metric": run_obj.config.selection_metric,
            "auc": run_obj.best.eval_final.auc_ovr,
            "accuracy": run_obj.best.eval_final.accuracy}
    (art / "best.json").write_text(json.dumps(best, sort_keys=True))
    (art / "validation.json").write_text(
        json.dumps(run_obj.validation.to_dict(), sort_keys=True))
    _save_ranks(run_obj.ranked, art / "ranks.csv")
    (art / "excluded.json").write_text(json.dumps(run_obj.excluded))

    (out / "run_info.json").write_text(json.dumps(
        {"provenance": run_obj.provenance}, sort_keys=True))
    write_manifest(out)


def _save_ranks(ranked, path: Path) -> None:
    lines = ["rank,id,score"]
    for rc in ranked:
        lines.append(f"{rc.rank},{rc.id},{rc.score!r}")
    path.write_text("\n".join(lines) + "\n")


def _save_plot_data(run_obj: PipelineRun, art: Path) -> None:
    """Plot-ready CSVs: class areas, facility distribution, mean |phi|."""
    area = ["model,class0_pct,class1_pct,class2_pct,class3_pct"]
    fac = ["model,class0,class1,class2,class3,nodata,"
           "class0_pct,class1_pct,class2_pct,class3_pct"]
    for kind, m in run_obj.models.items():
        klass = m.map.klass
        live = klass.cells[klass.cells != klass.header.nodata]
        shares = [100.0 * float((live == c).sum()) / live.size
                  for c in range(4)]
        area.append(kind + "," + ",".join(repr(s) for s in shares))
        v = validate_against_existing(m.map, run_obj.region)
        fac.append(kind + ","
                   + ",".join(str(int(c)) for c in v.counts)
                   + f",{v.nodata_count},"
                   + ",".join(repr(float(p)) for p in v.percentages))
    (art / "area_distribution.csv").write_text("\n".join(area) + "\n")
    (art / "facility_distribution.csv").write_text("\n".join(fac) + "\n")

    names = run_obj.criteria.names
    shap = ["model," + ",".join(names)]
    for kind, m in run_obj.models.items():
        shap.append(kind + ","
                    + ",".join(repr(float(v)) for v in m.shap_mean_abs))
    (art / "shap_mean_abs.csv").write_text("\n".join(shap) + "\n")


def write_manifest(run_dir: Path) -> None:
    digests = {}
    for p in sorted(run_dir.rglob("*")):
        if p.is_dir() or p.name in ("manifest.json", "run_info.json"):
            continue
        rel = p.relative_to(run_dir).as_posix()
        digests[rel] = hashlib.sha256(p.read_bytes()).hexdigest()
    (run_dir / "manifest.json").write_text(
        json.dumps({"artifacts": digests}, indent=2, sort_keys=True) + "\n")


def load_context(run_dir: str | Path) -> FrozenContext:
    d = Path(run_dir)
    art = d / "artifacts"
    required = ["config.cfg", "artifacts/best.json",
                "artifacts/criteria/norm_params.json"]
    for rel in required:
        if not (d / rel).exists():
            raise FileNotFoundError(f"run directory missing {rel}")
    config = PipelineConfig.from_file(d / "config.cfg")
    bundle = regionio.load_region(d / "inputs")
    best = json.loads((art / "best.json").read_text())
    kind = best["best_kind"]
    model, scaler = learn.load_model(art / "models" / f"{kind}.json")
    weights = WeightVector.load(art / f"weights_{kind}.csv")
    breaks_info = json.loads((art / f"breaks_{kind}.json").read_text())
    norm = json.loads((art / "criteria" / "norm_params.json").read_text())
    layers = []
    for name in weights.names:
        layers.append(geocore.load_raster(art / "criteria" / f"{name}.asc"))
    criteria = CriteriaSet(weights.names, tuple(layers))
    per_model = {}
    for k in config.model_kinds:
        wpath = art / f"weights_{k}.csv"
        if wpath.exists():
            per_model[k] = WeightVector.load(wpath).as_dict()
    return FrozenContext(
        region=bundle.region, criteria=criteria, weights=weights,
        breaks=tuple(breaks_info["breaks"]), model=model, scaler=scaler,
        d_new=float(norm["d_new"]), new_alloc=config.new_alloc,
        sdr_norm=(float(norm["sdr_norm_lo"]), float(norm["sdr_norm_hi"])),
        best_kind=kind, per_model_weights=per_model, run_id=d.name)
