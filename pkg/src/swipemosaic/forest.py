"""Regression random forests with Gaussian predictive output.

Each tree is trained on a bootstrap resample; at every node a fixed number
of random (feature, threshold) proposals are scored by variance reduction
summed over label dimensions, and the best is kept.  Prediction routes a
feature vector through every tree and fits a Gaussian to the per-tree leaf
means, so disagreement between trees is the model's uncertainty.
"""

from __future__ import annotations

import dataclasses
import json
import struct
import zlib

import numpy as np

# With fewer than two distinct tree outputs the sample std collapses; the
# floor keeps downstream least-squares weights finite.
SIGMA_FLOOR_TRANSLATION = 1e-3   # image-width units
SIGMA_FLOOR_ROTATION = 0.05     # degrees


@dataclasses.dataclass(frozen=True)
class ForestConfig:
    tree_count: int = 10
    max_depth: int = 12
    candidate_splits: int = 2000
    min_leaf: int = 4
    label_dim: int = 2
    rng_seed: int = 0
    sigma_floor: float = SIGMA_FLOOR_TRANSLATION

    def __post_init__(self):
        if self.tree_count < 1 or self.max_depth < 1:
            raise ValueError("tree_count and max_depth must be >= 1")
        if self.candidate_splits < 1 or self.min_leaf < 1:
            raise ValueError("candidate_splits and min_leaf must be >= 1")
        if self.label_dim not in (1, 2):
            raise ValueError("label_dim must be 1 or 2")


@dataclasses.dataclass(frozen=True)
class MotionEstimate:
    """Gaussian over relative motion plus the raw per-tree samples."""

    mean: np.ndarray
    sigma: np.ndarray
    samples: np.ndarray


class _Tree:
    """Flat-array binary tree: internal nodes hold (feature, threshold),
    leaves hold the training-label mean and sample count."""

    __slots__ = ("feature", "threshold", "left", "right", "leaf_mean", "leaf_count")

    def __init__(self, feature, threshold, left, right, leaf_mean, leaf_count):
        self.feature = feature      # int32, -1 for leaves
        self.threshold = threshold  # float64
        self.left = left            # int32 child ids, -1 for leaves
        self.right = right
        self.leaf_mean = leaf_mean  # (nodes, label_dim)
        self.leaf_count = leaf_count

    def predict(self, x):
        node = 0
        while self.feature[node] >= 0:
            if x[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return self.leaf_mean[node]

    def depth(self):
        depths = np.zeros(len(self.feature), dtype=int)
        for node in range(len(self.feature)):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max()) if len(depths) else 0


@dataclasses.dataclass(frozen=True)
class Forest:
    trees: tuple
    config: ForestConfig
    feature_dim: int

    def __post_init__(self):
        if len(self.trees) == 0:
            raise ValueError("forest must contain at least one tree")


class _TreeBuilder:
    def __init__(self, X, y, config, rng):
        self.X = X
        self.y = y
        self.config = config
        self.rng = rng
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.leaf_mean = []
        self.leaf_count = []

    def _new_node(self, idx):
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.leaf_mean.append(self.y[idx].mean(axis=0))
        self.leaf_count.append(len(idx))
        return len(self.feature) - 1

    def build(self, idx, depth):
        node = self._new_node(idx)
        cfg = self.config
        n = len(idx)
        ysub = self.y[idx]
        total_sse = float(((ysub - ysub.mean(axis=0)) ** 2).sum())
        if depth >= cfg.max_depth or n < 2 * cfg.min_leaf or total_sse <= 0.0:
            return node

        feats = self.rng.integers(0, self.X.shape[1], size=cfg.candidate_splits)
        Xsub = self.X[np.ix_(idx, feats)]  # (n, C)
        lo = Xsub.min(axis=0)
        hi = Xsub.max(axis=0)
        thresholds = self.rng.uniform(lo, hi)
        go_left = Xsub <= thresholds  # (n, C)
        n_left = go_left.sum(axis=0)
        valid = (n_left >= cfg.min_leaf) & (n - n_left >= cfg.min_leaf)
        if not valid.any():
            return node

        gl = go_left.astype(np.float64)
        sum_l = gl.T @ ysub                 # (C, d)
        sq_l = gl.T @ (ysub * ysub)
        sum_t = ysub.sum(axis=0)
        sq_t = (ysub * ysub).sum(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            sse_l = sq_l - sum_l ** 2 / n_left[:, None]
            n_right = (n - n_left)[:, None]
            sse_r = (sq_t - sq_l) - (sum_t - sum_l) ** 2 / n_right
        score = sse_l.sum(axis=1) + sse_r.sum(axis=1)
        score[~valid] = np.inf
        best = int(np.argmin(score))
        if not np.isfinite(score[best]) or score[best] >= total_sse * (1 - 1e-12):
            # No proposal reduces label variance; keep the leaf.
            return node
        mask = go_left[:, best]
        self.feature[node] = int(feats[best])
        self.threshold[node] = float(thresholds[best])
        self.left[node] = self.build(idx[mask], depth + 1)
        self.right[node] = self.build(idx[~mask], depth + 1)
        return node

    def finish(self):
        return _Tree(np.asarray(self.feature, dtype=np.int32),
                     np.asarray(self.threshold, dtype=np.float64),
                     np.asarray(self.left, dtype=np.int32),
                     np.asarray(self.right, dtype=np.int32),
                     np.asarray(self.leaf_mean, dtype=np.float64),
                     np.asarray(self.leaf_count, dtype=np.int64))


def train(dataset, config):
    """Train a forest on (feature_vector, label) pairs.

    Deterministic for a fixed config.rng_seed: every tree derives its own
    generator from (seed, tree index).
    """
    if len(dataset) == 0:
        raise ValueError("dataset must be non-empty")
    X = np.ascontiguousarray([np.asarray(v, dtype=np.float64) for v, _ in dataset])
    y = np.ascontiguousarray([np.atleast_1d(np.asarray(l, dtype=np.float64))
                              for _, l in dataset])
    if X.ndim != 2 or y.ndim != 2:
        raise ValueError("inconsistent feature or label dimensions in dataset")
    if y.shape[1] != config.label_dim:
        raise ValueError(f"label dim {y.shape[1]} does not match config {config.label_dim}")

    trees = []
    for t in range(config.tree_count):
        rng = np.random.default_rng(
            np.random.SeedSequence([config.rng_seed & 0xFFFFFFFF, t]))
        bootstrap = rng.integers(0, len(X), size=len(X))
        builder = _TreeBuilder(X, y, config, rng)
        builder.build(bootstrap, depth=0)
        trees.append(builder.finish())
    return Forest(trees=tuple(trees), config=config, feature_dim=X.shape[1])


def predict(forest, features):
    """Gaussian fit to the per-tree predictions for one feature vector."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (forest.feature_dim,):
        raise ValueError(f"feature dim {x.shape} does not match forest "
                         f"({forest.feature_dim},)")
    samples = np.array([tree.predict(x) for tree in forest.trees])
    mean = samples.mean(axis=0)
    if len(samples) > 1:
        sigma = samples.std(axis=0, ddof=1)
    else:
        sigma = np.zeros_like(mean)
    sigma = np.maximum(sigma, forest.config.sigma_floor)
    return MotionEstimate(mean=mean, sigma=sigma, samples=samples)


def predict_batch(forest, X):
    """Means and sigmas for many feature vectors; rows of X are vectors."""
    return [predict(forest, x) for x in np.asarray(X, dtype=np.float64)]


# --- binary serialization ---------------------------------------------------

_MAGIC = b"RRF1"
_VERSION = 1


def serialize(forest):
    """Versioned, checksummed binary encoding of a trained forest."""
    cfg = dataclasses.asdict(forest.config)
    cfg_blob = json.dumps(cfg, sort_keys=True).encode()
    out = [_MAGIC, struct.pack("<II", _VERSION, forest.feature_dim),
           struct.pack("<I", len(cfg_blob)), cfg_blob,
           struct.pack("<I", len(forest.trees))]
    for tree in forest.trees:
        nodes = len(tree.feature)
        out.append(struct.pack("<I", nodes))
        out.append(tree.feature.astype("<i4").tobytes())
        out.append(tree.threshold.astype("<f8").tobytes())
        out.append(tree.left.astype("<i4").tobytes())
        out.append(tree.right.astype("<i4").tobytes())
        out.append(tree.leaf_mean.astype("<f8").tobytes())
        out.append(tree.leaf_count.astype("<i8").tobytes())
    body = b"".join(out)
    return body + struct.pack("<I", zlib.crc32(body))


class ForestFormatError(ValueError):
    pass


class _Reader:
    def __init__(self, blob):
        self.blob = blob
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.blob):
            raise ForestFormatError("truncated forest data")
        out = self.blob[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self):
        return struct.unpack("<I", self.take(4))[0]


def deserialize(blob):
    if len(blob) < 12:
        raise ForestFormatError("truncated forest data")
    body, crc = blob[:-4], struct.unpack("<I", blob[-4:])[0]
    if zlib.crc32(body) != crc:
        raise ForestFormatError("forest data checksum mismatch")
    rd = _Reader(body)
    if rd.take(4) != _MAGIC:
        raise ForestFormatError("bad forest magic")
    version = rd.u32()
    if version != _VERSION:
        raise ForestFormatError(f"unsupported forest version {version}")
    feature_dim = rd.u32()
    cfg = json.loads(rd.take(rd.u32()).decode())
    config = ForestConfig(**cfg)
    trees = []
    for _ in range(rd.u32()):
        nodes = rd.u32()
        feature = np.frombuffer(rd.take(4 * nodes), dtype="<i4")
        threshold = np.frombuffer(rd.take(8 * nodes), dtype="<f8")
        left = np.frombuffer(rd.take(4 * nodes), dtype="<i4")
        right = np.frombuffer(rd.take(4 * nodes), dtype="<i4")
        leaf_mean = np.frombuffer(rd.take(8 * nodes * config.label_dim),
                                  dtype="<f8").reshape(nodes, config.label_dim)
        leaf_count = np.frombuffer(rd.take(8 * nodes), dtype="<i8")
        trees.append(_Tree(feature, threshold, left, right, leaf_mean, leaf_count))
    return Forest(trees=tuple(trees), config=config, feature_dim=feature_dim)


def save_forest(path, forest):
    with open(path, "wb") as fh:
        fh.write(serialize(forest))


def load_forest(path):
    with open(path, "rb") as fh:
        return deserialize(fh.read())


def dump_json(forest):
    """Human-readable dump for debugging; not meant for round-tripping."""
    return json.dumps({
        "config": dataclasses.asdict(forest.config),
        "feature_dim": forest.feature_dim,
        "trees": [{
            "nodes": len(t.feature),
            "depth": t.depth(),
            "features": t.feature.tolist(),
            "thresholds": t.threshold.tolist(),
            "leaf_means": t.leaf_mean.tolist(),
        } for t in forest.trees],
    }, indent=2)
