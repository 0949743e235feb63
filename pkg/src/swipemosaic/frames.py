"""Frame container and image ingestion helpers.

A Frame holds a single grayscale image with intensities in [0, 1] plus its
position in the sequence. Color inputs are converted with the usual
luminance weights; oversized inputs are downscaled so the larger dimension
does not exceed a configurable cap.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np
from PIL import Image

# Inputs larger than this (in either dimension) are downscaled on ingest.
DEFAULT_RESOLUTION_CAP = 768

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclasses.dataclass(frozen=True)
class Frame:
    """One grayscale image of the sequence."""

    pixels: np.ndarray  # (H, W) float64 in [0, 1]
    index: int
    timestamp: float | None = None

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("frame pixels must be a non-empty 2D array")
        if px.min() < -1e-9 or px.max() > 1 + 1e-9:
            raise ValueError("frame intensities must lie in [0, 1]")
        object.__setattr__(self, "pixels", px)
        if self.timestamp is None:
            object.__setattr__(self, "timestamp", float(self.index))

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]


def to_grayscale(rgb):
    """Collapse an (H, W, 3) array in [0, 1] to luminance."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim == 2:
        return rgb
    return rgb @ LUMA_WEIGHTS


def downscale_to_cap(pixels, cap=DEFAULT_RESOLUTION_CAP):
    """Resize so max(H, W) <= cap, preserving aspect ratio."""
    h, w = pixels.shape[:2]
    longest = max(h, w)
    if longest <= cap:
        return pixels
    scale = cap / longest
    new_w = max(1, int(round(w * scale)))
    new_h = max(1, int(round(h * scale)))
    img = Image.fromarray(np.clip(pixels * 255.0, 0, 255).astype(np.uint8))
    img = img.resize((new_w, new_h), Image.BILINEAR)
    return np.asarray(img, dtype=np.float64) / 255.0


def load_frame(path, index, resolution_cap=DEFAULT_RESOLUTION_CAP):
    """Decode one image file into a Frame."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            arr = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    except Exception as exc:
        raise IOError(f"cannot decode image file {path}") from exc
    gray = to_grayscale(arr)
    gray = downscale_to_cap(gray, resolution_cap)
    return Frame(pixels=gray, index=index)
