"""Command line entry points: synth | train | layout | eval | export."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np


def _cmd_synth(args):
    from .synth import generate_dataset, save_dataset

    items = generate_dataset(args.pairs, args.kind, args.seed,
                             image_size=(args.width, args.height),
                             max_shift=args.max_shift, max_angle=args.max_angle,
                             sensor_noise=args.sensor_noise, n_jobs=args.jobs)
    save_dataset(args.out, items, kind=args.kind, seed=args.seed,
                 config={"image_size": [args.width, args.height],
                         "max_shift": args.max_shift, "max_angle": args.max_angle,
                         "sensor_noise": args.sensor_noise})
    print(f"wrote {len(items)} labeled pairs to {args.out}")


def _cmd_train(args):
    from .forest import (SIGMA_FLOOR_ROTATION, SIGMA_FLOOR_TRANSLATION,
                         ForestConfig, save_forest, train)
    from .synth import generate_dataset, load_dataset

    if args.dataset:
        items, manifest = load_dataset(args.dataset)
        kind = manifest["kind"]
    else:
        kind = args.kind
        items = generate_dataset(args.pairs, kind, args.seed,
                                 n_jobs=args.jobs)
    label_dim = len(np.atleast_1d(items[0][1]))
    floor = SIGMA_FLOOR_TRANSLATION if kind == "translation" else SIGMA_FLOOR_ROTATION
    config = ForestConfig(tree_count=args.trees, max_depth=args.depth,
                          candidate_splits=args.splits, min_leaf=args.min_leaf,
                          label_dim=label_dim, rng_seed=args.seed,
                          sigma_floor=floor)
    forest = train(items, config)
    save_forest(args.out, forest)
    print(f"trained {kind} forest ({args.trees} trees, depth {args.depth}) -> {args.out}")


def _cmd_layout(args):
    from .pipeline import PipelineConfig, run_pipeline

    config = PipelineConfig(
        input_path=args.input, output_dir=args.out,
        translation_forest=args.forest, rotation_forest=args.rotation_forest,
        resolution_cap=args.resolution_cap, pair_window=args.window,
        loop_neighbors=args.loop_k, loop_min_separation=args.loop_n,
        rotation_correction=args.rotation_forest is not None,
        threads=args.jobs, cache_dir=args.cache_dir)
    manifest = run_pipeline(config)
    print(f"laid out {len(manifest.frames)} frames -> {args.out}/manifest.json")


def _cmd_eval(args):
    from .evaluation import (evaluate_pipeline, interpolate_ground_truth,
                             parse_tum_trajectory, write_report)
    from .forest import load_forest
    from .pipeline import ingest

    frames, _ = ingest(args.input, resolution_cap=args.resolution_cap)
    mocap = parse_tum_trajectory(args.ground_truth)
    poses = interpolate_ground_truth(mocap, [f.timestamp for f in frames])
    forest = load_forest(args.forest)
    report = evaluate_pipeline(frames, poses, forest=forest,
                               window=args.window, sweep=args.sweep)
    write_report(report, args.out)
    for method, stats in sorted(report["methods"].items()):
        print(f"{method}: best-fit plane MSE = {stats['best_fit_mse']:.6g}")


def _cmd_export(args):
    from .pipeline import export_bundle

    manifest = export_bundle(args.mosaic, args.out)
    print(f"exported {len(manifest.frames)} frames to {args.out}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="swipemosaic",
        description="Build and evaluate navigable swipe mosaics from image sequences.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--kind", choices=["translation", "rotation"], required=True)
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--height", type=int, default=96)
    p.add_argument("--max-shift", type=float, default=0.1)
    p.add_argument("--max-angle", type=float, default=5.0)
    p.add_argument("--sensor-noise", type=float, default=0.01)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train a regression forest")
    p.add_argument("--kind", choices=["translation", "rotation"], default="translation")
    p.add_argument("--dataset", help="pre-generated dataset directory")
    p.add_argument("--pairs", type=int, default=8800)
    p.add_argument("--trees", type=int, default=10)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--splits", type=int, default=2000)
    p.add_argument("--min-leaf", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("layout", help="run the full pipeline on a frame directory")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--forest", required=True, help="translation forest file")
    p.add_argument("--rotation-forest")
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--loop-k", type=int, default=5)
    p.add_argument("--loop-n", type=int, default=25)
    p.add_argument("--resolution-cap", type=int, default=768)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cache-dir")
    p.set_defaults(func=_cmd_layout)

    p = sub.add_parser("eval", help="compare methods against a TUM trajectory")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--ground-truth", required=True, help="TUM trajectory file")
    p.add_argument("--forest", required=True)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--resolution-cap", type=int, default=768)
    p.add_argument("--sweep", action="store_true",
                   help="also sweep per-camera projection planes")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("export", help="re-emit a mosaic bundle for the viewer")
    p.add_argument("--mosaic", required=True, help="pipeline output directory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        args.func(args)
    except (ValueError, FileNotFoundError, IOError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
