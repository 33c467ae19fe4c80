"""Command-line front door for every pipeline stage.

Every subcommand prints one machine-readable summary line on success and a
single diagnostic line to stderr on failure (exit 2 for usage errors, 1 for
runtime errors). All randomness hangs off --seed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import geocore, learn, pipeline, regionio, sdr, synth
from .criteria import build_criteria
from .explain import exact_shapley, shap_to_weights
from .overlay import (SuitabilityMap, WeightVector, classify_map,
                      equal_interval_breaks, jenks_partition, relabel,
                      sample_points, split, weighted_sum)


def _parse_weights(text: str, names) -> WeightVector:
    if text == "equal":
        return WeightVector.equal(names)
    if Path(text).exists():
        return WeightVector.load(text)
    vals = [float(t) for t in text.split(",")]
    return WeightVector(tuple(names), np.asarray(vals))


def _criteria_for(bundle, d_new=None, new_alloc="radius"):
    table = sdr.compute_sdr(bundle.region, d_new=d_new, new_alloc=new_alloc)
    raw = regionio.build_raw_layers(bundle.region, bundle.masks,
                                    rate_layers=bundle.rate_layers,
                                    sdr_table=table)
    return table, build_criteria(raw, bundle.rules)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    from .criteria import CANONICAL_CRITERIA

    names = tuple(n for n, _ in CANONICAL_CRITERIA)
    planted = (_parse_weights(args.weights, names) if args.weights
               else WeightVector.equal(names))
    bundle = synth.make_bundle(
        args.seed, planted, ncols=args.ncols, nrows=args.nrows,
        n_counties=args.counties, n_facilities=args.facilities,
        n_candidates=args.candidates, cellsize=args.cellsize,
        radius=args.radius, facility_placement=args.placement)
    regionio.save_region(bundle, args.out)
    print(f"gen out={args.out} seed={args.seed} "
          f"counties={args.counties} facilities={args.facilities} "
          f"grid={args.ncols}x{args.nrows}")
    return 0


def cmd_sdr(args) -> int:
    bundle = regionio.load_region(args.region)
    region = bundle.region
    if args.radius is not None:
        from dataclasses import replace

        region = replace(region, radius=args.radius)
    table = sdr.compute_sdr(region, d_new=args.d_new, new_alloc=args.alloc)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sdr.save_sdr_table(table, out / "sdr_table.csv")
    geocore.save_raster(sdr.sdr_raster(table, region), out / "sdr.asc")
    defined = int(table.defined.sum())
    print(f"sdr out={out} counties={len(table.county_ids)} defined={defined}")
    return 0


def cmd_map(args) -> int:
    bundle = regionio.load_region(args.region)
    _, criteria = _criteria_for(bundle, d_new=args.d_new)
    weights = _parse_weights(args.weights, criteria.names)
    scored = weighted_sum(criteria, weights)
    sample = sample_points(scored, criteria, args.n, args.seed)
    if args.breaks == "jenks":
        breaks, _ = jenks_partition(sample.score)
    else:
        breaks = equal_interval_breaks(sample.score)
    m = classify_map(scored, breaks, args.breaks)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    geocore.save_raster(m.score, out / "score.asc")
    geocore.save_raster(m.klass, out / "class.asc")
    (out / "breaks.json").write_text(json.dumps(
        {"breaks": list(m.breaks), "method": m.method}))
    weights.save(out / "weights.csv")
    print(f"map out={out} method={args.breaks} "
          f"breaks={','.join(repr(b) for b in m.breaks)}")
    return 0


def cmd_sample(args) -> int:
    bundle = regionio.load_region(args.region)
    _, criteria = _criteria_for(bundle, d_new=args.d_new)
    map_dir = Path(args.map)
    score = geocore.load_raster(map_dir / "score.asc")
    info = json.loads((map_dir / "breaks.json").read_text())
    m = SuitabilityMap(score=score)
    samples = sample_points(m, criteria, args.n, args.seed,
                            breaks=tuple(info["breaks"]),
                            method=info["method"])
    samples = split(samples, args.train_frac, args.seed + 1)
    samples.save(args.out)
    print(f"sample out={args.out} n={samples.n} seed={args.seed}")
    return 0


def cmd_train(args) -> int:
    from .overlay import SampleSet

    samples = SampleSet.load(args.samples)
    if not (samples.split >= 0).any():
        samples = split(samples, 0.8, args.seed)
    train, test = samples.train(), samples.test()
    scaler = learn.StandardScaler().fit(train.features)
    Xtr = scaler.transform(train.features)
    Xte = scaler.transform(test.features)
    Xb, yb = learn.smote_enn(Xtr, train.label, seed=args.seed + 1)
    out = Path(args.out)
    (out / "models").mkdir(parents=True, exist_ok=True)
    kinds = args.kinds.split(",") if args.kinds else list(learn.KINDS)
    summary = []
    for kind in kinds:
        if args.grid_search:
            params, _ = learn.grid_search(
                kind, Xb, yb, learn.default_grid(kind, samples.features.shape[1]),
                folds=args.folds, seed=args.seed)
        else:
            params = {}
        model = learn.fit(kind, Xb, yb, params=params, seed=args.seed)
        rep = learn.evaluate(model, Xte, test.label)
        learn.save_model(model, out / "models" / f"{kind}.json", scaler=scaler)
        (out / f"eval_{kind}.json").write_text(json.dumps(
            {"params": params, "eval": rep.to_dict()}, sort_keys=True))
        summary.append(f"{kind}:acc={rep.accuracy:.4f}:auc={rep.auc_ovr:.4f}")
    print("train out=%s %s" % (out, " ".join(summary)))
    return 0


def cmd_explain(args) -> int:
    from .overlay import SampleSet

    samples = SampleSet.load(args.samples)
    train, test = samples.train(), samples.test()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    models_dir = Path(args.models)
    summary = []
    for path in sorted(models_dir.glob("*.json")):
        model, scaler = learn.load_model(path)
        Xtr = scaler.transform(train.features)
        Xte = scaler.transform(test.features)
        bg = Xtr[rng.choice(Xtr.shape[0],
                            size=min(args.background, Xtr.shape[0]),
                            replace=False)]
        ex = Xte[rng.choice(Xte.shape[0],
                            size=min(args.n_explain, Xte.shape[0]),
                            replace=False)]
        rep = exact_shapley(model, ex, bg, feature_names=samples.names)
        rep.save(out / f"shap_{model.kind}.csv")
        weights = shap_to_weights(rep, samples.names)
        weights.save(out / f"weights_{model.kind}.csv")
        summary.append(model.kind)
    print(f"explain out={out} models={','.join(summary)}")
    return 0


def cmd_retune(args) -> int:
    bundle = regionio.load_region(args.region)
    _, criteria = _criteria_for(bundle, d_new=args.d_new)
    out = Path(args.out)
    (out / "models").mkdir(parents=True, exist_ok=True)
    summary = []
    for wpath in sorted(Path(args.weights).glob("weights_*.csv")):
        kind = wpath.stem.removeprefix("weights_")
        weights = WeightVector.load(wpath)
        scored = weighted_sum(criteria, weights)
        resample = sample_points(scored, criteria, args.n, args.seed)
        jb, _ = jenks_partition(resample.score)
        resample = relabel(resample, jb)
        tuned = classify_map(scored, jb, "jenks")
        resample = split(resample, 0.8, args.seed + 1)
        train, test = resample.train(), resample.test()
        scaler = learn.StandardScaler().fit(train.features)
        Xb, yb = learn.smote_enn(scaler.transform(train.features),
                                 train.label, seed=args.seed + 2)
        model = learn.fit(kind, Xb, yb, seed=args.seed)
        rep = learn.evaluate(model, scaler.transform(test.features), test.label)
        geocore.save_raster(tuned.score, out / f"map_{kind}_score.asc")
        geocore.save_raster(tuned.klass, out / f"map_{kind}_class.asc")
        (out / f"breaks_{kind}.json").write_text(json.dumps(
            {"breaks": list(tuned.breaks), "method": "jenks"}))
        resample.save(out / f"samples_{kind}.csv")
        learn.save_model(model, out / "models" / f"{kind}.json", scaler=scaler)
        (out / f"eval_{kind}.json").write_text(json.dumps(
            {"eval": rep.to_dict()}, sort_keys=True))
        summary.append(f"{kind}:acc={rep.accuracy:.4f}:auc={rep.auc_ovr:.4f}")
    print("retune out=%s %s" % (out, " ".join(summary)))
    return 0


def cmd_run(args) -> int:
    if args.config:
        config = pipeline.PipelineConfig.from_file(args.config)
    else:
        config = pipeline.PipelineConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.region:
        config.region_dir = args.region
    run_obj = pipeline.run(config, out_dir=args.out)
    best = run_obj.best
    print(f"run out={args.out} best={run_obj.best_kind} "
          f"acc={best.eval_final.accuracy:.4f} "
          f"auc={best.eval_final.auc_ovr:.4f} "
          f"ranked={len(run_obj.ranked)}")
    return 0


def cmd_validate(args) -> int:
    ctx = pipeline.load_context(args.run)
    state = pipeline.scenario_state(ctx)
    v = state.validation
    if v is None:
        raise RuntimeError("run region has no existing facilities")
    if args.format == "json":
        print(json.dumps(v.to_dict(), sort_keys=True))
    else:
        print("validate " + " ".join(
            f"class{c}={v.counts[c]}({v.percentages[c]:.1f}%)"
            for c in range(4)) + f" nodata={v.nodata_count}")
    return 0


def cmd_rank(args) -> int:
    ctx = pipeline.load_context(args.run)
    state = pipeline.scenario_state(ctx)
    ranked = state.ranked[:args.top] if args.top else state.ranked
    if args.format == "json":
        print(json.dumps([{"rank": r.rank, "id": r.id, "x": r.x, "y": r.y,
                           "score": r.score, "class": r.class_label}
                          for r in ranked]))
    else:
        for r in ranked:
            print(f"{r.rank},{r.id},{r.score!r}")
    return 0


def cmd_serve(args) -> int:
    from . import service

    server = service.serve(args.run, bind=(args.host, args.port))
    host, port = server.server_address
    print(f"serve run={args.run} listening on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sitewise",
                                description="learning-based site suitability")
    p.add_argument("--threads", type=int,
                   default=0, help="worker threads (0 = all cores)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic region")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--ncols", type=int, default=100)
    g.add_argument("--nrows", type=int, default=100)
    g.add_argument("--counties", type=int, default=6)
    g.add_argument("--facilities", type=int, default=4)
    g.add_argument("--candidates", type=int, default=150)
    g.add_argument("--cellsize", type=float, default=1000.0)
    g.add_argument("--radius", type=float, default=None)
    g.add_argument("--weights", default=None,
                   help='"equal", comma list, or weights.csv path')
    g.add_argument("--placement", choices=("random", "top_truth"),
                   default="random")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("sdr", help="compute the supply-demand ratio table")
    s.add_argument("--region", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--d-new", dest="d_new", type=float, default=None)
    s.add_argument("--radius", type=float, default=None)
    s.add_argument("--alloc", choices=("radius", "whole"), default="radius")
    s.set_defaults(func=cmd_sdr)

    m = sub.add_parser("map", help="weighted-sum suitability map")
    m.add_argument("--region", required=True)
    m.add_argument("--weights", default="equal")
    m.add_argument("--out", required=True)
    m.add_argument("--breaks", choices=("equal", "jenks"), default="equal")
    m.add_argument("--n", type=int, default=2000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--d-new", dest="d_new", type=float, default=None)
    m.set_defaults(func=cmd_map)

    sa = sub.add_parser("sample", help="draw labeled sample points")
    sa.add_argument("--region", required=True)
    sa.add_argument("--map", required=True)
    sa.add_argument("--n", type=int, default=2000)
    sa.add_argument("--seed", type=int, default=0)
    sa.add_argument("--train-frac", dest="train_frac", type=float, default=0.8)
    sa.add_argument("--out", required=True)
    sa.add_argument("--d-new", dest="d_new", type=float, default=None)
    sa.set_defaults(func=cmd_sample)

    t = sub.add_parser("train", help="train the classifier battery")
    t.add_argument("--samples", required=True)
    t.add_argument("--out", required=True)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--grid-search", dest="grid_search", action="store_true")
    t.add_argument("--no-grid-search", dest="grid_search",
                   action="store_false")
    t.add_argument("--folds", type=int, default=5)
    t.add_argument("--kinds", default=None, help="comma list of model kinds")
    t.set_defaults(func=cmd_train, grid_search=False)

    e = sub.add_parser("explain", help="exact Shapley attribution per model")
    e.add_argument("--samples", required=True)
    e.add_argument("--models", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--background", type=int, default=64)
    e.add_argument("--n-explain", dest="n_explain", type=int, default=32)
    e.set_defaults(func=cmd_explain)

    rt = sub.add_parser("retune", help="rebuild maps from tuned weights and retrain")
    rt.add_argument("--region", required=True)
    rt.add_argument("--weights", required=True,
                    help="directory holding weights_<kind>.csv files")
    rt.add_argument("--out", required=True)
    rt.add_argument("--n", type=int, default=2000)
    rt.add_argument("--seed", type=int, default=0)
    rt.add_argument("--d-new", dest="d_new", type=float, default=None)
    rt.set_defaults(func=cmd_retune)

    r = sub.add_parser("run", help="run the full pipeline")
    r.add_argument("--config", default=None)
    r.add_argument("--out", required=True)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--region", default=None)
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate", help="facility distribution over classes")
    v.add_argument("--run", required=True)
    v.add_argument("--format", choices=("csv", "json"), default="csv")
    v.set_defaults(func=cmd_validate)

    rk = sub.add_parser("rank", help="rank candidates from a finished run")
    rk.add_argument("--run", required=True)
    rk.add_argument("--top", type=int, default=None)
    rk.add_argument("--format", choices=("csv", "json"), default="csv")
    rk.set_defaults(func=cmd_rank)

    sv = sub.add_parser("serve", help="HTTP scenario service over a run")
    sv.add_argument("--run", required=True)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8765)
    sv.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("SITEWISE_LOG", "WARNING"))
    parser = build_parser()
    args = parser.parse_args(argv)
    os.environ["SITEWISE_THREADS"] = str(args.threads)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"sitewise: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
