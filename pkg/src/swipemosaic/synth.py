"""Synthetic training pairs with known planar translation or rotation.

Scenes are stacks of textured billboards at different depth factors,
rendered twice with the virtual camera displaced (or rotated about the
optical axis) between the two renders.  Parallax comes from dividing the
camera translation by each layer's depth factor; dynamic distractors get
their own velocity.  Textures are procedural (value noise, gratings,
stripes, tiled glyphs, flat fills) so no external imagery is needed.

Layers are drawn from 2x supersampled sources with bilinear sampling, so
labels are continuous rather than snapped to the pixel grid.

Conventions: translation labels are the camera displacement (dx, dy) in
units of the image *width* for both axes; the camera at position c sees
world content at pixel + c, so image content moves by -c pixels.  Rotation
labels are degrees, positive rotating image content counterclockwise in
array coordinates.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates

from .features import extract_features, load_features, save_features
from .frames import Frame

DEFAULT_IMAGE_SIZE = (128, 96)  # (width, height)
DEFAULT_MAX_SHIFT = 0.1         # fraction of image width
DEFAULT_MAX_ANGLE = 5.0         # degrees

TEXTURE_FAMILIES = ("noise", "periodic", "stripes", "flat", "mixed")

# Sampling mix for generate_dataset; textureless and periodic scenes are
# included so the forest learns when to be uncertain.
_FAMILY_WEIGHTS = {
    "noise": 0.40,
    "periodic": 0.15,
    "stripes_h": 0.10,
    "stripes_v": 0.10,
    "flat": 0.10,
    "mixed": 0.15,
}


@dataclasses.dataclass(frozen=True)
class LayerSpec:
    """One textured billboard of a scene."""

    texture: str                 # texture generator id
    depth: float = 1.0           # >= 1; apparent shift = camera shift / depth
    velocity: tuple[float, float] = (0.0, 0.0)  # px/frame, dynamic distractors
    billboard: tuple[float, float, float, float] | None = None  # frac rect, None = full
    seed: int = 0

    def __post_init__(self):
        if not np.isfinite(self.depth) or self.depth < 1.0:
            raise ValueError("layer depth factor must be finite and >= 1")


@dataclasses.dataclass(frozen=True)
class SceneSpec:
    layers: tuple[LayerSpec, ...]
    texture_family: str
    rng_seed: int

    def __post_init__(self):
        if len(self.layers) == 0:
            raise ValueError("scene needs at least one layer")


@dataclasses.dataclass(frozen=True)
class LabeledPair:
    a: Frame
    b: Frame
    label: np.ndarray  # (2,) translation in width units, or (1,) degrees


# --- procedural textures (rendered at 2x supersampling) ---------------------

def _tex_noise(rng, shape):
    fine = rng.standard_normal(shape)
    out = gaussian_filter(fine, 1.5) + 0.6 * gaussian_filter(fine, 6.0)
    out -= out.min()
    peak = out.max()
    return out / peak if peak > 0 else out


def _tex_periodic(rng, shape):
    h, w = shape
    y, x = np.mgrid[0:h, 0:w].astype(np.float64)
    out = np.zeros(shape)
    for _ in range(3):
        wavelength = rng.uniform(16.0, 64.0)
        angle = rng.uniform(0.0, np.pi)
        phase = rng.uniform(0.0, 2 * np.pi)
        k = 2 * np.pi / wavelength
        out += np.sin(k * (x * np.cos(angle) + y * np.sin(angle)) + phase)
    out -= out.min()
    return out / out.max()


def _tex_stripes(rng, shape, axis):
    # axis 0: intensity varies along y only (horizontal stripes);
    # axis 1: varies along x only (vertical stripes).
    h, w = shape
    coord = np.arange(shape[axis], dtype=np.float64)
    wavelength = rng.uniform(16.0, 48.0)
    phase = rng.uniform(0.0, 2 * np.pi)
    profile = 0.5 + 0.5 * np.sin(2 * np.pi * coord / wavelength + phase)
    profile += 0.05 * np.sin(2 * np.pi * coord / (wavelength * 3.7) + phase * 1.7)
    profile = np.clip(profile, 0.0, 1.0)
    return np.tile(profile[:, None], (1, w)) if axis == 0 else np.tile(profile[None, :], (h, 1))


def _tex_glyphs(rng, shape):
    # Tiled random binary stamp: strong repeated structure in both axes.
    tile = (rng.random((16, 16)) > 0.5).astype(np.float64)
    tile = gaussian_filter(tile, 0.8)
    reps = (shape[0] // 16 + 1, shape[1] // 16 + 1)
    return np.tile(tile, reps)[:shape[0], :shape[1]]


def _tex_flat(rng, shape):
    return np.full(shape, rng.uniform(0.2, 0.8))


def _make_texture(name, rng, shape):
    if name == "noise":
        return _tex_noise(rng, shape)
    if name == "periodic":
        return _tex_periodic(rng, shape)
    if name == "stripes_h":
        return _tex_stripes(rng, shape, axis=0)
    if name == "stripes_v":
        return _tex_stripes(rng, shape, axis=1)
    if name == "glyphs":
        return _tex_glyphs(rng, shape)
    if name == "flat":
        return _tex_flat(rng, shape)
    raise ValueError(f"unknown texture id {name!r}")


# --- rendering --------------------------------------------------------------

class _RenderedScene:
    """Layer textures baked at 2x over an oversized world window."""

    def __init__(self, spec, width, height, margin=None):
        self.width = width
        self.height = height
        self.margin = int(np.ceil(0.4 * max(width, height))) if margin is None else margin
        self.layers = []
        shape2x = (2 * (height + 2 * self.margin), 2 * (width + 2 * self.margin))
        for layer in spec.layers:
            rng = np.random.default_rng(np.random.SeedSequence([spec.rng_seed & 0xFFFFFFFF,
                                                                layer.seed]))
            tex = _make_texture(layer.texture, rng, shape2x)
            alpha = None
            if layer.billboard is not None:
                fx0, fy0, fx1, fy1 = layer.billboard
                mask = np.zeros(shape2x)
                y0 = int(fy0 * shape2x[0])
                y1 = int(fy1 * shape2x[0])
                x0 = int(fx0 * shape2x[1])
                x1 = int(fx1 * shape2x[1])
                mask[y0:y1, x0:x1] = 1.0
                alpha = gaussian_filter(mask, 1.0)
            self.layers.append((layer, tex, alpha))

    def render(self, camera=(0.0, 0.0), time=0.0, rotation_deg=0.0):
        """Render one frame for a camera offset (px), time, and roll angle."""
        h, w, m = self.height, self.width, self.margin
        y, x = np.mgrid[0:h, 0:w].astype(np.float64)
        if rotation_deg != 0.0:
            cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
            ang = np.deg2rad(rotation_deg)
            xr = np.cos(ang) * (x - cx) + np.sin(ang) * (y - cy) + cx
            yr = -np.sin(ang) * (x - cx) + np.cos(ang) * (y - cy) + cy
            x, y = xr, yr
        out = np.zeros((h, w))
        for layer, tex, alpha in self.layers:
            sx = camera[0] / layer.depth + layer.velocity[0] * time
            sy = camera[1] / layer.depth + layer.velocity[1] * time
            coords = np.array([2.0 * (y + sy + m), 2.0 * (x + sx + m)])
            sampled = map_coordinates(tex, coords, order=1, mode="nearest")
            if alpha is None:
                out = sampled
            else:
                a = map_coordinates(alpha, coords, order=1, mode="nearest")
                out = out * (1.0 - a) + sampled * a
        return np.clip(out, 0.0, 1.0)


def _add_sensor_noise(pixels, rng, amount):
    if amount <= 0.0:
        return pixels
    return np.clip(pixels + rng.normal(0.0, amount, pixels.shape), 0.0, 1.0)


def generate_translation_pair(spec, max_shift=DEFAULT_MAX_SHIFT,
                              image_size=DEFAULT_IMAGE_SIZE, label=None,
                              sensor_noise=0.0):
    """Render a pair differing by a random in-plane camera translation.

    ``sensor_noise`` adds independent per-frame Gaussian noise; without it
    a textureless scene yields two mathematically identical images, which
    real capture never does.
    """
    if not (0.0 < max_shift <= 0.3):
        raise ValueError("max_shift must lie in (0, 0.3]")
    width, height = image_size
    rng = np.random.default_rng(np.random.SeedSequence([spec.rng_seed & 0xFFFFFFFF, 1]))
    if label is None:
        label = rng.uniform(-max_shift, max_shift, size=2)
    label = np.asarray(label, dtype=np.float64)
    scene = _RenderedScene(spec, width, height)
    a = scene.render(camera=(0.0, 0.0), time=0.0)
    b = scene.render(camera=(label[0] * width, label[1] * width), time=1.0)
    a = _add_sensor_noise(a, rng, sensor_noise)
    b = _add_sensor_noise(b, rng, sensor_noise)
    return LabeledPair(a=Frame(a, index=0), b=Frame(b, index=1), label=label)


def generate_rotation_pair(spec, max_angle=DEFAULT_MAX_ANGLE,
                           image_size=DEFAULT_IMAGE_SIZE, angle=None,
                           sensor_noise=0.0):
    """Render a pair differing by a rotation about the optical axis."""
    if not (0.0 < max_angle <= 15.0):
        raise ValueError("max_angle must lie in (0, 15]")
    width, height = image_size
    rng = np.random.default_rng(np.random.SeedSequence([spec.rng_seed & 0xFFFFFFFF, 2]))
    if angle is None:
        angle = float(rng.uniform(-max_angle, max_angle))
    scene = _RenderedScene(spec, width, height)
    a = scene.render()
    b = scene.render(rotation_deg=angle)
    a = _add_sensor_noise(a, rng, sensor_noise)
    b = _add_sensor_noise(b, rng, sensor_noise)
    return LabeledPair(a=Frame(a, index=0), b=Frame(b, index=1),
                       label=np.array([angle]))


def render_sequence(spec, cameras, image_size=DEFAULT_IMAGE_SIZE, noise=0.0,
                    noise_seed=0, margin=None):
    """Render one frame per camera position (px) over a shared scene.

    The world margin grows with the camera excursion so long sweeps never
    sample past the baked texture.  Optional per-frame sensor noise
    (stddev ``noise``) is added independently to every frame.
    """
    width, height = image_size
    cameras = np.asarray(cameras, dtype=np.float64)
    if cameras.ndim != 2 or cameras.shape[1] != 2:
        raise ValueError("cameras must be an (N, 2) array of pixel offsets")
    if margin is None:
        margin = int(np.ceil(0.4 * max(width, height) + np.abs(cameras).max()))
    scene = _RenderedScene(spec, width, height, margin=margin)
    rng = np.random.default_rng(noise_seed)
    frames = []
    for i, cam in enumerate(cameras):
        px = scene.render(camera=(cam[0], cam[1]), time=float(i))
        if noise > 0.0:
            px = np.clip(px + rng.normal(0.0, noise, px.shape), 0.0, 1.0)
        frames.append(Frame(px, index=i))
    return frames


def rotate_frame(frame, angle_deg):
    """Rotate a frame's content about its center (bilinear, edge clamped)."""
    h, w = frame.pixels.shape
    y, x = np.mgrid[0:h, 0:w].astype(np.float64)
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    ang = np.deg2rad(angle_deg)
    xr = np.cos(ang) * (x - cx) + np.sin(ang) * (y - cy) + cx
    yr = -np.sin(ang) * (x - cx) + np.cos(ang) * (y - cy) + cy
    out = map_coordinates(frame.pixels, np.array([yr, xr]), order=1, mode="nearest")
    return Frame(np.clip(out, 0.0, 1.0), index=frame.index, timestamp=frame.timestamp)


# --- scene sampling ---------------------------------------------------------

def make_scene_spec(family, seed, rng=None):
    """Build a SceneSpec for one of the texture families."""
    rng = np.random.default_rng(seed) if rng is None else rng
    if family == "noise":
        layers = (LayerSpec("noise", seed=0),)
    elif family == "periodic":
        tex = "periodic" if rng.random() < 0.6 else "glyphs"
        layers = (LayerSpec(tex, seed=0),)
    elif family == "stripes_h":
        layers = (LayerSpec("stripes_h", seed=0),)
    elif family == "stripes_v":
        layers = (LayerSpec("stripes_v", seed=0),)
    elif family == "flat":
        layers = (LayerSpec("flat", seed=0),)
    elif family == "mixed":
        base_tex = rng.choice(["noise", "periodic", "stripes_h", "stripes_v", "flat"])
        # A far background (large depth factor) under a depth-1 foreground
        # mimics scenes where only part of the frame tracks the camera.
        if rng.random() < 0.3:
            base_depth = rng.uniform(20.0, 100.0)
        else:
            base_depth = rng.uniform(1.0, 3.0)
        layers = [LayerSpec(str(base_tex), depth=base_depth, seed=0)]
        for li in range(rng.integers(1, 3)):
            tex = rng.choice(["noise", "periodic", "glyphs"])
            x0, y0 = rng.uniform(0.1, 0.6, size=2)
            bw, bh = rng.uniform(0.15, 0.4, size=2)
            vel = tuple(rng.uniform(-2.0, 2.0, size=2)) if rng.random() < 0.5 else (0.0, 0.0)
            layers.append(LayerSpec(str(tex), depth=rng.uniform(1.0, 5.0),
                                    velocity=vel,
                                    billboard=(x0, y0, min(1.0, x0 + bw), min(1.0, y0 + bh)),
                                    seed=li + 1))
        layers = tuple(layers)
    else:
        raise ValueError(f"unknown texture family {family!r}")
    canonical = family.split("_")[0] if family.startswith("stripes") else family
    return SceneSpec(layers=tuple(layers), texture_family=canonical, rng_seed=seed)


def _sample_family(rng):
    names = list(_FAMILY_WEIGHTS)
    weights = np.array([_FAMILY_WEIGHTS[n] for n in names])
    return names[rng.choice(len(names), p=weights / weights.sum())]


def _dataset_item(args):
    index, kind, seed, image_size, max_shift, max_angle, family, noise = args
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFF, index]))
    fam = family or _sample_family(rng)
    spec = make_scene_spec(fam, int(rng.integers(0, 2 ** 31)), rng=rng)
    if kind == "translation":
        pair = generate_translation_pair(spec, max_shift=max_shift,
                                         image_size=image_size,
                                         sensor_noise=noise)
    else:
        pair = generate_rotation_pair(spec, max_angle=max_angle,
                                      image_size=image_size,
                                      sensor_noise=noise)
    return extract_features(pair.a, pair.b), pair.label


def generate_dataset(count, kind, seed, image_size=DEFAULT_IMAGE_SIZE,
                     max_shift=DEFAULT_MAX_SHIFT, max_angle=DEFAULT_MAX_ANGLE,
                     family=None, sensor_noise=0.01, n_jobs=1):
    """Sampled labeled feature vectors over the texture family mix.

    Deterministic for a fixed seed: each pair derives its own RNG from
    (seed, index), so results do not depend on worker scheduling.  Mild
    per-frame sensor noise is on by default so textureless scenes produce
    realistically unpredictable features rather than bit-identical frames.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if kind not in ("translation", "rotation"):
        raise ValueError(f"unknown dataset kind {kind!r}")
    jobs = [(i, kind, seed, tuple(image_size), max_shift, max_angle, family,
             sensor_noise)
            for i in range(count)]
    if n_jobs and n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            items = list(pool.map(_dataset_item, jobs, chunksize=16))
    else:
        items = [_dataset_item(j) for j in jobs]
    return items


# --- persistence ------------------------------------------------------------

def save_dataset(directory, items, kind, seed, config=None):
    """Write features/NNNNNN.bin, labels.csv and a manifest for reproducibility."""
    directory = Path(directory)
    (directory / "features").mkdir(parents=True, exist_ok=True)
    label_dim = len(np.atleast_1d(items[0][1]))
    with open(directory / "labels.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "dx", "dy"] if label_dim == 2 else ["index", "angle"])
        for i, (vec, label) in enumerate(items):
            save_features(directory / "features" / f"{i:06d}.bin", vec)
            writer.writerow([i] + [repr(float(v)) for v in np.atleast_1d(label)])
    manifest = {"kind": kind, "seed": seed, "count": len(items),
                "label_dim": label_dim, "config": config or {}}
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def load_dataset(directory):
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    items = []
    with open(directory / "labels.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            i = int(row["index"])
            vec = load_features(directory / "features" / f"{i:06d}.bin")
            if manifest["label_dim"] == 2:
                label = np.array([float(row["dx"]), float(row["dy"])])
            else:
                label = np.array([float(row["angle"])])
            items.append((vec, label))
    return items, manifest
