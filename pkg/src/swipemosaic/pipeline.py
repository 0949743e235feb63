"""End-to-end orchestration: ingest frames, estimate pairwise motion,
solve the layout with loop closure and optional rotational correction, and
export a manifest the swipe viewer can browse.

Feature vectors are cached on disk keyed by the content hash of the pair
plus a hash of the extraction configuration, so reruns skip extraction
entirely.  Pair-level work runs on a thread pool; results are merged in
pair order, so thread count never changes the output.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import shutil
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from PIL import Image

from . import features as feat
from .forest import load_forest, predict
from .frames import DEFAULT_RESOLUTION_CAP, Frame, load_frame
from .layout import (close_loops, crop_for_rotation, select_pairs,
                     solve_layout, solve_rotations)

log = logging.getLogger("swipemosaic.pipeline")

CACHE_ENV_VAR = "SWIPEMOSAIC_CACHE_DIR"
MANIFEST_VERSION = 1

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg"}


@dataclasses.dataclass
class PipelineConfig:
    input_path: str
    output_dir: str
    translation_forest: str
    rotation_forest: str | None = None
    resolution_cap: int = DEFAULT_RESOLUTION_CAP
    pair_window: int = 4
    loop_neighbors: int = 5
    loop_min_separation: int = 25
    rotation_correction: bool = False
    threads: int = 1
    cache_dir: str | None = None

    def __post_init__(self):
        if self.pair_window < 1 or self.loop_neighbors < 1 or self.loop_min_separation < 1:
            raise ValueError("pair_window, loop_neighbors and loop_min_separation "
                             "must be >= 1")


@dataclasses.dataclass(frozen=True)
class MosaicManifest:
    version: int
    frames: tuple            # dicts: image, x, y, rotation_deg, timestamp
    bounding_box: tuple      # (min_x, min_y, max_x, max_y)
    thumbnail: str

    def to_json(self):
        return json.dumps({
            "version": self.version,
            "frames": list(self.frames),
            "bounding_box": list(self.bounding_box),
            "thumbnail": self.thumbnail,
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        if data.get("version") != MANIFEST_VERSION:
            raise ValueError(f"unsupported manifest version {data.get('version')}")
        return cls(version=data["version"],
                   frames=tuple(data["frames"]),
                   bounding_box=tuple(data["bounding_box"]),
                   thumbnail=data["thumbnail"])


def ingest(path, resolution_cap=DEFAULT_RESOLUTION_CAP):
    """Load a directory of images (or a frame-list file) as a sequence.

    Frames are ordered lexicographically by filename.  Mixed resolutions
    are normalized to the working cap; aspect ratios differing by more
    than 5% are rejected.
    Returns (frames, source_paths).
    """
    path = Path(path)
    if path.is_dir():
        files = sorted(p for p in path.iterdir()
                       if p.suffix.lower() in IMAGE_EXTENSIONS)
    elif path.is_file():
        files = [Path(line.strip()) for line in path.read_text().splitlines()
                 if line.strip()]
    else:
        raise FileNotFoundError(f"input path {path} does not exist")
    if len(files) < 2:
        raise ValueError(f"need at least 2 frames, found {len(files)} in {path}")
    frames = [load_frame(f, index=i, resolution_cap=resolution_cap)
              for i, f in enumerate(files)]
    ratios = np.array([f.width / f.height for f in frames])
    if ratios.max() / ratios.min() > 1.05:
        raise ValueError("input images have aspect ratios differing by more than 5%")
    base = frames[0].pixels.shape
    normalized = []
    for f in frames:
        if f.pixels.shape != base:
            img = Image.fromarray((f.pixels * 255).astype(np.uint8))
            img = img.resize((base[1], base[0]), Image.BILINEAR)
            f = Frame(np.asarray(img, dtype=np.float64) / 255.0, index=f.index)
        normalized.append(f)
    return normalized, files


# --- feature cache ----------------------------------------------------------


def _extraction_config_hash():
    cfg = {"levels": feat.GRID_LEVELS, "dim": feat.feature_dim(),
           "laplace": feat.LAPLACE_SCALES, "hist_bins": feat.HIST_BINS}
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


class FeatureCache:
    """Append-only on-disk cache of extracted feature vectors."""

    def __init__(self, directory=None):
        if directory is None:
            directory = os.environ.get(CACHE_ENV_VAR)
        self.directory = Path(directory) if directory else None
        if self.directory:
            self.directory.mkdir(parents=True, exist_ok=True)
        self.config_hash = _extraction_config_hash()
        self.hits = 0
        self.misses = 0

    def _key(self, a, b):
        digest = hashlib.sha256()
        digest.update(a.pixels.tobytes())
        digest.update(b.pixels.tobytes())
        digest.update(self.config_hash.encode())
        return digest.hexdigest()

    def extract(self, a, b):
        if self.directory is None:
            return feat.extract_features(a, b)
        path = self.directory / f"{self._key(a, b)}.bin"
        if path.exists():
            self.hits += 1
            return feat.load_features(path)
        vec = feat.extract_features(a, b)
        self.misses += 1
        # Atomic write so concurrent runs never observe partial files.
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        os.close(fd)
        feat.save_features(tmp, vec)
        os.replace(tmp, path)
        return vec


def _predict_pairs(frames, pairs, forest, cache, threads):
    def work(pair):
        j, k = pair
        return pair, predict(forest, cache.extract(frames[j], frames[k]))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, pairs))
    else:
        results = [work(p) for p in pairs]
    # Merge in deterministic pair order regardless of scheduling.
    return dict(sorted(results, key=lambda item: item[0]))


def _render_minimap(positions, path, size=256):
    pos = np.asarray(positions)
    lo = pos.min(axis=0)
    span = np.maximum(pos.max(axis=0) - lo, 1e-9)
    scale = (size - 16) / span.max()
    canvas = np.full((size, size), 255, dtype=np.uint8)
    for x, y in pos:
        px = int(8 + (x - lo[0]) * scale)
        py = int(8 + (y - lo[1]) * scale)
        canvas[max(0, py - 2):py + 3, max(0, px - 2):px + 3] = 40
    Image.fromarray(canvas).save(path)


def run_pipeline(config):
    """Run the full analysis and write the viewer bundle.

    Stages: pair selection, feature extraction and prediction, global
    layout, loop closure, optional rotational correction, manifest export.
    """
    frames, files = ingest(config.input_path, resolution_cap=config.resolution_cap)
    forest = load_forest(config.translation_forest)
    cache = FeatureCache(config.cache_dir)
    width = frames[0].width

    pair_set = select_pairs(len(frames), config.pair_window)
    log.info("predicting %d temporal pairs", len(pair_set))
    temporal = _predict_pairs(frames, pair_set.pairs, forest, cache, config.threads)

    solution, loop_estimates = close_loops(
        frames, temporal, forest,
        k=config.loop_neighbors, n=config.loop_min_separation)
    log.info("loop closure added %d pairs (cache: %d hits, %d misses)",
             len(loop_estimates), cache.hits, cache.misses)

    rotations = np.zeros(len(frames))
    if config.rotation_correction and config.rotation_forest and loop_estimates:
        rot_forest = load_forest(config.rotation_forest)
        rot_estimates = {}
        for (j, k), est in loop_estimates.items():
            try:
                ca, cb = crop_for_rotation(frames[j], frames[k],
                                           (est.mean[0] * width, est.mean[1] * width))
            except ValueError:
                continue
            rot_estimates[(j, k)] = predict(rot_forest, cache.extract(ca, cb))
        if rot_estimates:
            rotations = solve_rotations(len(frames), rot_estimates)

    out = Path(config.output_dir)
    images_dir = out / "images"
    images_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for i, (frame, src) in enumerate(zip(frames, files)):
        if Path(src).exists():
            name = f"frame_{i:05d}{Path(src).suffix.lower()}"
            shutil.copyfile(src, images_dir / name)
        else:
            name = f"frame_{i:05d}.png"
            Image.fromarray((frame.pixels * 255).astype(np.uint8)).save(images_dir / name)
        records.append({
            "image": f"images/{name}",
            "x": float(solution.positions[i, 0]),
            "y": float(solution.positions[i, 1]),
            "rotation_deg": float(rotations[i]),
            "timestamp": float(frame.timestamp),
        })
    lo = solution.positions.min(axis=0)
    hi = solution.positions.max(axis=0)
    _render_minimap(solution.positions, out / "minimap.png")
    manifest = MosaicManifest(
        version=MANIFEST_VERSION, frames=tuple(records),
        bounding_box=(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])),
        thumbnail="minimap.png")
    (out / "manifest.json").write_text(manifest.to_json())
    return manifest


def run_pipeline_frames(frames, forest, pair_window=4, loop_neighbors=5,
                        loop_min_separation=25, threads=1, cache=None):
    """Library entry point for already-loaded frames; returns the layout
    solution after loop closure."""
    cache = cache or FeatureCache(None)
    pair_set = select_pairs(len(frames), pair_window)
    temporal = _predict_pairs(frames, pair_set.pairs, forest, cache, threads)
    solution, loop_estimates = close_loops(
        frames, temporal, forest, k=loop_neighbors, n=loop_min_separation)
    return solution, temporal, loop_estimates


def export_bundle(manifest_dir, destination):
    """Copy a rendered mosaic bundle (manifest + images) elsewhere, e.g. to
    a static web root for the browser viewer."""
    manifest_dir = Path(manifest_dir)
    destination = Path(destination)
    manifest = MosaicManifest.from_json((manifest_dir / "manifest.json").read_text())
    destination.mkdir(parents=True, exist_ok=True)
    shutil.copyfile(manifest_dir / "manifest.json", destination / "manifest.json")
    if (manifest_dir / manifest.thumbnail).exists():
        shutil.copyfile(manifest_dir / manifest.thumbnail,
                        destination / manifest.thumbnail)
    (destination / "images").mkdir(exist_ok=True)
    for record in manifest.frames:
        src = manifest_dir / record["image"]
        shutil.copyfile(src, destination / record["image"])
    return manifest
