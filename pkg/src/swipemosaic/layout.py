"""Global 2D layout from pairwise Gaussian motion estimates.

Frame positions minimize the uncertainty-weighted least squares error
between actual pairwise offsets and the predicted means, with the first
frame anchored at the origin.  Loop closure finds spatially near but
temporally distant frame pairs, predicts their relative motion, and
re-solves; rotational correction solves an analogous 1D system.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve
from scipy.spatial import cKDTree

from .features import extract_features
from .forest import predict

ANCHOR_WEIGHT = 1e6
DEFAULT_LOOP_NEIGHBORS = 5
DEFAULT_LOOP_MIN_SEPARATION = 25


@dataclasses.dataclass(frozen=True)
class PairSet:
    """Ordered (j, k) index pairs, j < k, tagged temporal or loop."""

    pairs: tuple
    tags: tuple

    def __post_init__(self):
        if len(self.pairs) != len(set(self.pairs)):
            raise ValueError("duplicate pairs in PairSet")
        for (j, k) in self.pairs:
            if not j < k:
                raise ValueError(f"pair ({j}, {k}) must be ordered j < k")

    def __len__(self):
        return len(self.pairs)

    def union(self, other):
        pairs = list(self.pairs)
        tags = list(self.tags)
        have = set(self.pairs)
        for pair, tag in zip(other.pairs, other.tags):
            if pair not in have:
                pairs.append(pair)
                tags.append(tag)
        return PairSet(pairs=tuple(pairs), tags=tuple(tags))


@dataclasses.dataclass(frozen=True)
class LayoutSolution:
    positions: np.ndarray            # (N, 2) layout coordinates, frame 0 at origin
    pair_set: PairSet
    rotations: np.ndarray | None = None  # degrees per frame


class DisconnectedGraphError(ValueError):
    def __init__(self, components):
        self.components = components
        preview = [sorted(c)[:5] for c in components]
        super().__init__(f"estimate graph is disconnected: {len(components)} "
                         f"components, e.g. {preview}")


def select_pairs(frame_count, window):
    """All pairs (j, k) with 0 < k - j <= window, tagged temporal."""
    if frame_count < 2:
        raise ValueError("need at least 2 frames")
    if window < 1:
        raise ValueError("window must be >= 1")
    pairs = [(j, k) for j in range(frame_count)
             for k in range(j + 1, min(j + window + 1, frame_count))]
    return PairSet(pairs=tuple(pairs), tags=tuple("temporal" for _ in pairs))


def _check_connected(frame_count, pairs):
    rows = [j for j, _ in pairs] + [k for _, k in pairs]
    cols = [k for _, k in pairs] + [j for j, _ in pairs]
    adj = sp.coo_matrix((np.ones(len(rows)), (rows, cols)),
                        shape=(frame_count, frame_count))
    n_comp, labels = connected_components(adj, directed=False)
    if n_comp > 1:
        comps = [np.flatnonzero(labels == c).tolist() for c in range(n_comp)]
        raise DisconnectedGraphError(comps)


def solve_layout(frame_count, estimates, pair_set=None):
    """Weighted least-squares frame positions from pairwise estimates.

    ``estimates`` maps (j, k) -> MotionEstimate with 2D mean/sigma.  Solved
    through the sparse normal equations; the anchor on frame 0 is two
    high-weight rows, so the system stays an ordinary least squares problem.
    """
    pairs = sorted(estimates)
    _check_connected(frame_count, pairs)
    rows, cols, vals, b = [], [], [], []
    row = 0
    for (j, k) in pairs:
        est = estimates[(j, k)]
        for axis in range(2):
            w = 1.0 / est.sigma[axis]
            rows += [row, row]
            cols += [2 * k + axis, 2 * j + axis]
            vals += [w, -w]
            b.append(est.mean[axis] * w)
            row += 1
    for axis in range(2):
        rows.append(row)
        cols.append(axis)
        vals.append(ANCHOR_WEIGHT)
        b.append(0.0)
        row += 1
    A = sp.csr_matrix((vals, (rows, cols)), shape=(row, 2 * frame_count))
    b = np.asarray(b)
    x = spsolve((A.T @ A).tocsc(), A.T @ b)
    positions = x.reshape(frame_count, 2)
    if pair_set is None:
        pair_set = PairSet(pairs=tuple(pairs), tags=tuple("temporal" for _ in pairs))
    return LayoutSolution(positions=positions, pair_set=pair_set)


def find_loop_points(solution, timestamps=None, k=DEFAULT_LOOP_NEIGHBORS,
                     n=DEFAULT_LOOP_MIN_SEPARATION):
    """Spatially near, temporally distant frame pairs.

    For each frame, among its k nearest neighbors in layout space, every
    neighbor whose timestamp differs by strictly more than n becomes a loop
    pair.  Pairs already present in the solution's pair set are skipped.
    """
    positions = solution.positions
    count = len(positions)
    if timestamps is None:
        timestamps = np.arange(count, dtype=np.float64)
    timestamps = np.asarray(timestamps, dtype=np.float64)
    existing = set(solution.pair_set.pairs)
    tree = cKDTree(positions)
    found = set()
    n_query = min(k + 1, count)
    _, neighbors = tree.query(positions, k=n_query)
    neighbors = np.atleast_2d(neighbors)
    for i in range(count):
        for nb in neighbors[i]:
            nb = int(nb)
            if nb == i:
                continue
            if abs(timestamps[i] - timestamps[nb]) > n:
                pair = (min(i, nb), max(i, nb))
                if pair not in existing:
                    found.add(pair)
    pairs = tuple(sorted(found))
    return PairSet(pairs=pairs, tags=tuple("loop" for _ in pairs))


def close_loops(frames, temporal_estimates, forest, timestamps=None,
                k=DEFAULT_LOOP_NEIGHBORS, n=DEFAULT_LOOP_MIN_SEPARATION,
                iterations=1):
    """Re-solve the layout with forest predictions for detected loop pairs.

    Returns (solution, loop_estimates); with no loop points the initial
    layout is returned unchanged.
    """
    frame_count = len(frames)
    solution = solve_layout(frame_count, temporal_estimates)
    all_estimates = dict(temporal_estimates)
    loop_estimates = {}
    for _ in range(iterations):
        loops = find_loop_points(solution, timestamps=timestamps, k=k, n=n)
        new_pairs = [p for p in loops.pairs if p not in all_estimates]
        if not new_pairs:
            break
        for (j, kk) in new_pairs:
            vec = extract_features(frames[j], frames[kk])
            est = predict(forest, vec)
            all_estimates[(j, kk)] = est
            loop_estimates[(j, kk)] = est
        pair_set = solution.pair_set.union(loops)
        solution = solve_layout(frame_count, all_estimates, pair_set=pair_set)
    return solution, loop_estimates


class InsufficientOverlapError(ValueError):
    pass


def crop_for_rotation(a, b, translation_px):
    """Equal-size centered overlap crops for a predicted pure translation.

    ``translation_px`` is the camera translation (dx, dy) from a to b in
    pixels; image content correspondingly moves by (-dx, -dy).  The crops
    are chosen so their centers show the same scene point, leaving rotation
    as the only difference for the rotational regressor.
    """
    h, w = a.pixels.shape
    dx = int(round(translation_px[0]))
    dy = int(round(translation_px[1]))
    if abs(dx) >= w or abs(dy) >= h:
        raise InsufficientOverlapError(f"translation {translation_px} leaves no overlap")
    ow, oh = w - abs(dx), h - abs(dy)
    if ow * oh < 0.25 * w * h:
        raise InsufficientOverlapError(
            f"overlap {ow}x{oh} is less than 25% of frame area")
    ax0 = max(dx, 0)
    ay0 = max(dy, 0)
    bx0 = max(-dx, 0)
    by0 = max(-dy, 0)
    crop_a = a.pixels[ay0:ay0 + oh, ax0:ax0 + ow]
    crop_b = b.pixels[by0:by0 + oh, bx0:bx0 + ow]
    from .frames import Frame
    return (Frame(crop_a, index=a.index, timestamp=a.timestamp),
            Frame(crop_b, index=b.index, timestamp=b.timestamp))


def solve_rotations(frame_count, loop_rotation_estimates,
                    smoothness_weight=1.0, zero_prior_weight=0.01):
    """Per-frame roll angles from 1D loop-pair rotation estimates.

    Three residual families: predicted relative rotations over loop pairs
    weighted by 1/sigma, a weak zero prior on every frame, and smoothness
    between temporal neighbors.  Frame 0 is anchored hard at zero.
    """
    rows, cols, vals, b = [], [], [], []
    row = 0
    for (j, k), est in sorted(loop_rotation_estimates.items()):
        w = 1.0 / float(est.sigma[0])
        rows += [row, row]
        cols += [k, j]
        vals += [w, -w]
        b.append(float(est.mean[0]) * w)
        row += 1
    for i in range(frame_count):
        rows.append(row)
        cols.append(i)
        vals.append(zero_prior_weight)
        b.append(0.0)
        row += 1
    for i in range(frame_count - 1):
        rows += [row, row]
        cols += [i + 1, i]
        vals += [smoothness_weight, -smoothness_weight]
        b.append(0.0)
        row += 1
    rows.append(row)
    cols.append(0)
    vals.append(ANCHOR_WEIGHT)
    b.append(0.0)
    row += 1
    A = sp.csr_matrix((vals, (rows, cols)), shape=(row, frame_count))
    b = np.asarray(b)
    return np.asarray(spsolve((A.T @ A).tocsc(), A.T @ b)).reshape(frame_count)
