"""Baselines and metrics: whole-image NCC alignment, motion-capture ground
truth interpolation, plane projection, Procrustes alignment, and trajectory
MSE reports.

The NCC baseline estimates a single translation per image pair from the
global peak of a normalized cross correlation, which is exactly the direct
method the probabilistic regressor is compared against.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path

import numpy as np

from .features import compute_ncc, extract_features
from .forest import MotionEstimate, predict
from .layout import select_pairs, solve_layout

# --- whole-image NCC alignment ---------------------------------------------


@dataclasses.dataclass(frozen=True)
class AlignmentResult:
    offset: tuple[int, int]  # (dx, dy): content displacement from a to b, px
    degenerate: bool
    peak_value: float


def ncc_align(a, b, max_shift_frac=0.3):
    """Pixel offset of image content between two equal-size frames.

    An inset window of the first frame is correlated over the whole second
    frame, and the global argmax (first in row-major scan order) is
    converted to an offset.  The returned (dx, dy) is where content of
    ``a`` reappears in ``b``; antisymmetric on exact-shift pairs.  If both
    windows are textureless the offset is (0, 0) with the degenerate flag
    set.
    """
    pa = a.pixels if hasattr(a, "pixels") else np.asarray(a, dtype=np.float64)
    pb = b.pixels if hasattr(b, "pixels") else np.asarray(b, dtype=np.float64)
    if pa.shape != pb.shape:
        raise ValueError("frames must have identical dimensions")
    h, w = pa.shape
    mx = int(np.ceil(max_shift_frac * w))
    my = int(np.ceil(max_shift_frac * h))
    if w - 2 * mx < 4 or h - 2 * my < 4:
        raise ValueError("max_shift_frac leaves too small a template")
    template = pa[my:h - my, mx:w - mx]
    resp = compute_ncc(template, pb, zero_offset=(mx, my))
    if resp.values.max() == 0.0 and resp.values.min() == 0.0:
        return AlignmentResult(offset=(0, 0), degenerate=True, peak_value=0.0)
    px, py = resp.peak_coords()
    return AlignmentResult(offset=(px - mx, py - my), degenerate=False,
                           peak_value=float(resp.values[py, px]))


# --- ground truth poses -----------------------------------------------------


@dataclasses.dataclass(frozen=True)
class CameraPose:
    position: np.ndarray    # (3,) meters
    orientation: np.ndarray  # (4,) unit quaternion, (x, y, z, w)
    timestamp: float

    def __post_init__(self):
        q = np.asarray(self.orientation, dtype=np.float64)
        if abs(np.linalg.norm(q) - 1.0) > 1e-9:
            raise ValueError("orientation quaternion must be unit norm")
        object.__setattr__(self, "position", np.asarray(self.position, dtype=np.float64))
        object.__setattr__(self, "orientation", q)


def _quat_rotate(q, v):
    x, y, z, w = q
    u = np.array([x, y, z])
    return 2.0 * np.dot(u, v) * u + (w * w - np.dot(u, u)) * v + 2.0 * w * np.cross(u, v)


def camera_axes(pose):
    """(forward, right, up) unit vectors; canonical camera looks down -z
    with +x right and +y up."""
    fwd = _quat_rotate(pose.orientation, np.array([0.0, 0.0, -1.0]))
    right = _quat_rotate(pose.orientation, np.array([1.0, 0.0, 0.0]))
    up = _quat_rotate(pose.orientation, np.array([0.0, 1.0, 0.0]))
    return fwd, right, up


def parse_tum_trajectory(path):
    """TUM format: 'timestamp tx ty tz qx qy qz qw', '#' comments ignored."""
    poses = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != 8:
            raise ValueError(f"malformed trajectory line: {line!r}")
        t, tx, ty, tz, qx, qy, qz, qw = map(float, fields)
        q = np.array([qx, qy, qz, qw])
        q = q / np.linalg.norm(q)
        poses.append(CameraPose(position=np.array([tx, ty, tz]),
                                orientation=q, timestamp=t))
    return poses


def interpolate_ground_truth(mocap, frame_timestamps):
    """Pose per frame by linear interpolation of the motion capture track.

    Positions interpolate linearly; quaternions use normalized lerp with
    shortest-arc sign correction.
    """
    times = np.array([p.timestamp for p in mocap])
    if not np.all(np.diff(times) > 0):
        raise ValueError("mocap timestamps must be strictly increasing")
    out = []
    for t in frame_timestamps:
        if t < times[0] or t > times[-1]:
            raise ValueError(f"frame timestamp {t} outside mocap range "
                             f"[{times[0]}, {times[-1]}]")
        hi = int(np.searchsorted(times, t, side="left"))
        if times[hi] == t:
            out.append(mocap[hi])
            continue
        lo = hi - 1
        alpha = (t - times[lo]) / (times[hi] - times[lo])
        pos = (1 - alpha) * mocap[lo].position + alpha * mocap[hi].position
        q0 = mocap[lo].orientation
        q1 = mocap[hi].orientation
        if np.dot(q0, q1) < 0:
            q1 = -q1
        q = (1 - alpha) * q0 + alpha * q1
        q = q / np.linalg.norm(q)
        out.append(CameraPose(position=pos, orientation=q, timestamp=float(t)))
    return out


# --- plane projection -------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class PlaneBasis:
    normal: np.ndarray
    u1: np.ndarray
    u2: np.ndarray


class DegeneratePlaneError(ValueError):
    pass


def _complete_basis(normal):
    helper = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(helper, normal)) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    u1 = helper - np.dot(helper, normal) * normal
    u1 = u1 / np.linalg.norm(u1)
    u2 = np.cross(normal, u1)
    return u1, u2


def best_fit_plane(poses):
    """Plane whose normal is the mean camera forward direction.

    Also reports the maximum angle between the normal and any individual
    forward vector, a measure of how planar the motion really is.
    """
    if len(poses) == 0:
        raise ValueError("need at least one pose")
    forwards = np.array([camera_axes(p)[0] for p in poses])
    mean_fwd = forwards.mean(axis=0)
    norm = np.linalg.norm(mean_fwd)
    if norm < 1e-9:
        raise DegeneratePlaneError("mean forward direction is near zero")
    normal = mean_fwd / norm
    u1, u2 = _complete_basis(normal)
    cosines = np.clip(forwards @ normal, -1.0, 1.0)
    max_dev_deg = float(np.degrees(np.arccos(cosines).max()))
    return PlaneBasis(normal=normal, u1=u1, u2=u2), max_dev_deg


def camera_plane_basis(pose):
    """Basis from one camera's right/up vectors (for the per-camera sweep)."""
    fwd, right, up = camera_axes(pose)
    return PlaneBasis(normal=fwd, u1=right, u2=up)


def project_to_plane(poses, basis):
    """(u1 . c, u2 . c) per camera position."""
    pts = np.array([[np.dot(basis.u1, p.position), np.dot(basis.u2, p.position)]
                    for p in poses])
    return pts


# --- Procrustes -------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class SimilarityTransform:
    scale: float
    rotation: np.ndarray   # (2, 2), det +1
    translation: np.ndarray

    def apply(self, points):
        return self.scale * (np.asarray(points) @ self.rotation.T) + self.translation


def procrustes_align(candidate, reference):
    """Closed-form similarity transform (scale, rotation, translation)
    minimizing the summed squared distance from transformed candidate
    points to the reference; reflections are disallowed.

    Returns (transform, mse) where mse is in squared reference units.
    """
    P = np.asarray(candidate, dtype=np.float64)
    Q = np.asarray(reference, dtype=np.float64)
    if P.shape != Q.shape or P.ndim != 2 or P.shape[0] < 2:
        raise ValueError("point sets must be equal-length (N, 2) arrays, N >= 2")
    mu_p = P.mean(axis=0)
    mu_q = Q.mean(axis=0)
    P0 = P - mu_p
    Q0 = Q - mu_q
    if float((Q0 ** 2).sum()) < 1e-24:
        raise ValueError("degenerate reference: all points identical")
    var_p = float((P0 ** 2).sum()) / len(P)
    C = (Q0.T @ P0) / len(P)
    U, S, Vt = np.linalg.svd(C)
    d = np.ones(2)
    if np.linalg.det(U @ Vt) < 0:
        d[-1] = -1.0
    R = U @ np.diag(d) @ Vt
    scale = float(np.sum(S * d) / var_p) if var_p > 0 else 0.0
    t = mu_q - scale * (R @ mu_p)
    transform = SimilarityTransform(scale=scale, rotation=R, translation=t)
    mse = float(((transform.apply(P) - Q) ** 2).sum(axis=1).mean())
    return transform, mse


# --- end-to-end comparison --------------------------------------------------


def pairwise_estimates(frames, window=4, method="rrf", forest=None,
                       ncc_sigma=1.0, max_shift_frac=0.3):
    """Pairwise 2D motion estimates for all temporal pairs in a window.

    For 'rrf' the trained forest supplies mean and sigma; for 'ncc' the
    global correlation peak is converted to a camera translation in
    image-width units with a constant sigma (the baseline is deterministic
    and carries no uncertainty of its own).
    """
    pair_set = select_pairs(len(frames), window)
    width = frames[0].width
    estimates = {}
    for (j, k) in pair_set.pairs:
        if method == "rrf":
            if forest is None:
                raise ValueError("method 'rrf' needs a trained forest")
            estimates[(j, k)] = predict(forest, extract_features(frames[j], frames[k]))
        elif method == "ncc":
            res = ncc_align(frames[j], frames[k], max_shift_frac=max_shift_frac)
            # Content moves opposite to the camera.
            mean = np.array([-res.offset[0] / width, -res.offset[1] / width])
            estimates[(j, k)] = MotionEstimate(
                mean=mean, sigma=np.array([ncc_sigma, ncc_sigma]),
                samples=mean[None, :])
        else:
            raise ValueError(f"unknown method {method!r}")
    return estimates


def evaluate_method(frames, reference_2d, method, forest=None, window=4):
    """Layout the sequence with one method and align it to a reference
    trajectory; returns (mse, transform, positions)."""
    estimates = pairwise_estimates(frames, window=window, method=method, forest=forest)
    solution = solve_layout(len(frames), estimates)
    transform, mse = procrustes_align(solution.positions, reference_2d)
    return mse, transform, solution.positions


def evaluate_pipeline(frames, ground_truth, methods=("rrf", "ncc"),
                      forest=None, window=4, sweep=False):
    """Compare layout methods against ground truth.

    ``ground_truth`` is either an (N, 2) trajectory or a list of
    CameraPose; poses are projected onto the best-fit plane (and, when
    ``sweep`` is set, onto each per-camera plane in turn).
    """
    report = {"methods": {}, "plane": None}
    if isinstance(ground_truth, np.ndarray) or (
            len(ground_truth) and not isinstance(ground_truth[0], CameraPose)):
        reference = np.asarray(ground_truth, dtype=np.float64)
    else:
        basis, max_dev = best_fit_plane(ground_truth)
        reference = project_to_plane(ground_truth, basis)
        report["plane"] = {"normal": basis.normal.tolist(),
                           "max_forward_deviation_deg": max_dev}
    positions = {}
    for method in methods:
        mse, _, pos = evaluate_method(frames, reference, method,
                                      forest=forest, window=window)
        report["methods"][method] = {"best_fit_mse": mse}
        positions[method] = pos
    if sweep and len(ground_truth) and isinstance(ground_truth[0], CameraPose):
        curves = {m: [] for m in methods}
        for pose in ground_truth:
            basis_i = camera_plane_basis(pose)
            ref_i = project_to_plane(ground_truth, basis_i)
            for m in methods:
                try:
                    _, mse_i = procrustes_align(positions[m], ref_i)
                except ValueError:
                    mse_i = float("nan")
                curves[m].append(mse_i)
        for m in methods:
            report["methods"][m]["sweep_mse"] = curves[m]
    return report


def write_report(report, directory):
    """Emit summary JSON plus a CSV of per-plane MSEs."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "summary.json").write_text(json.dumps(report, indent=2, sort_keys=True))
    methods = sorted(report["methods"])
    with open(directory / "mse.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["plane"] + [f"mse_{m}" for m in methods])
        writer.writerow(["best_fit"] + [report["methods"][m]["best_fit_mse"]
                                        for m in methods])
        n_sweep = len(report["methods"][methods[0]].get("sweep_mse", []))
        for i in range(n_sweep):
            writer.writerow([f"camera_{i}"] +
                            [report["methods"][m]["sweep_mse"][i] for m in methods])
