"""NCC-pyramid feature extraction for an ordered image pair.

An image pair is described by running normalized cross correlation between
corresponding cells of nested grids (1x1, 2x2, 4x4, 6x6, 8x8) and encoding
each correlation surface as a small set of statistics: extrema, peak
location, Laplacian slices through the peak, a histogram, and (for the two
coarsest grids) the responses of a Gabor filter bank applied to the
correlation surface. The concatenation over all 121 cells is a fixed-length
vector, independent of the input resolution.

Sign convention: the first image of the pair provides the template windows,
the second provides the enlarged search windows, so the encoded peak
offsets measure where content of the first image reappears in the second.
"""

from __future__ import annotations

import dataclasses
import struct
from functools import lru_cache

import numpy as np
from scipy.signal import fftconvolve

GRID_LEVELS = (1, 2, 4, 6, 8)
CELL_COUNT = sum(l * l for l in GRID_LEVELS)  # 121
GABOR_MAX_LEVEL = 2
LAPLACE_SCALES = (10, 20)
HIST_BINS = 5

# Window variance below this is treated as textureless (NCC score 0).
VARIANCE_EPS = 1e-12

# Per-cell slice: min/max/mean + 2 peak coords + 8 Laplace + 5 histogram.
BASE_SLICE_LEN = 18
GABOR_SLICE_LEN = 4  # min/max/mean/median per filter


@dataclasses.dataclass(frozen=True)
class Rect:
    """Half-open pixel rectangle [x0, x1) x [y0, y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self):
        return self.x1 - self.x0

    @property
    def height(self):
        return self.y1 - self.y0

    def contains(self, other):
        return (self.x0 <= other.x0 and self.y0 <= other.y0
                and self.x1 >= other.x1 and self.y1 >= other.y1)


@dataclasses.dataclass(frozen=True)
class GridCell:
    level: int
    cell_x: int
    cell_y: int
    template_rect: Rect
    search_rect: Rect


@dataclasses.dataclass(frozen=True)
class NccResponse:
    """2D correlation surface for one template/search window pair.

    ``values[dy, dx]`` is the ZNCC score of the template placed at offset
    (dx, dy) inside the search window.  ``zero_offset`` gives the (dx, dy)
    that corresponds to zero relative shift, and ``template_shape`` the
    (height, width) used to normalize peak offsets.
    """

    values: np.ndarray
    zero_offset: tuple[int, int] = (0, 0)
    template_shape: tuple[int, int] | None = None

    @property
    def shape(self):
        return self.values.shape

    def peak_coords(self):
        """(x, y) of the maximum, first match in row-major scan order."""
        flat = int(np.argmax(self.values))
        y, x = divmod(flat, self.values.shape[1])
        return x, y


def window_geometry(level, cell_x, cell_y, width, height):
    """Template and search rectangles for one grid cell.

    The template is the (cell_x, cell_y) cell of the level x level grid;
    the search window expands it by one template width/height per side,
    truncated at the image borders.
    """
    if level not in GRID_LEVELS:
        raise ValueError(f"invalid grid level {level}, must be one of {GRID_LEVELS}")
    if not (0 <= cell_x < level and 0 <= cell_y < level):
        raise ValueError(f"cell ({cell_x}, {cell_y}) out of range for level {level}")
    x0 = cell_x * width // level
    x1 = (cell_x + 1) * width // level
    y0 = cell_y * height // level
    y1 = (cell_y + 1) * height // level
    tw, th = x1 - x0, y1 - y0
    search = Rect(max(0, x0 - tw), max(0, y0 - th),
                  min(width, x1 + tw), min(height, y1 + th))
    return GridCell(level=level, cell_x=cell_x, cell_y=cell_y,
                    template_rect=Rect(x0, y0, x1, y1), search_rect=search)


def _box_sums(arr, win_h, win_w):
    """Sliding-window sums over all win_h x win_w windows (valid mode)."""
    # Integral image with a zero border so differencing is uniform.
    ii = np.zeros((arr.shape[0] + 1, arr.shape[1] + 1))
    np.cumsum(arr, axis=0, out=ii[1:, 1:])
    np.cumsum(ii[1:, 1:], axis=1, out=ii[1:, 1:])
    return (ii[win_h:, win_w:] - ii[:-win_h, win_w:]
            - ii[win_h:, :-win_w] + ii[:-win_h, :-win_w])


def compute_ncc(template, search, zero_offset=(0, 0), template_shape=None):
    """Zero-mean, unit-variance NCC of a template over a search window.

    Returns an NccResponse of shape (Sh - Th + 1, Sw - Tw + 1).  Offsets
    where either window has variance below VARIANCE_EPS score 0.
    """
    template = np.asarray(template, dtype=np.float64)
    search = np.asarray(search, dtype=np.float64)
    if template.size == 0 or search.size == 0:
        raise ValueError("template and search windows must be non-empty")
    th, tw = template.shape
    sh, sw = search.shape
    if th > sh or tw > sw:
        raise ValueError(f"template {template.shape} larger than search {search.shape}")

    n = th * tw
    t0 = template - template.mean()
    t_sq = float(np.sum(t0 * t0))

    if t_sq / n < VARIANCE_EPS:
        values = np.zeros((sh - th + 1, sw - tw + 1))
    else:
        s1 = _box_sums(search, th, tw)
        s2 = _box_sums(search * search, th, tw)
        win_sq = np.maximum(s2 - s1 * s1 / n, 0.0)
        if n <= 4096:
            # Direct correlation is exact and fast for small templates.
            from numpy.lib.stride_tricks import sliding_window_view
            windows = sliding_window_view(search, (th, tw))
            cross = np.einsum("ijkl,kl->ij", windows, t0)
        else:
            cross = fftconvolve(search, t0[::-1, ::-1], mode="valid")
        with np.errstate(divide="ignore", invalid="ignore"):
            values = cross / np.sqrt(t_sq * win_sq)
        values[win_sq / n < VARIANCE_EPS] = 0.0
        np.clip(values, -1.0, 1.0, out=values)
    if template_shape is None:
        template_shape = (th, tw)
    return NccResponse(values=values, zero_offset=tuple(zero_offset),
                       template_shape=tuple(template_shape))


_LAPLACE_ANGLES = (0.0, np.pi / 4, np.pi / 2, 3 * np.pi / 4)


def laplace_coords(response, peak, p):
    """Laplacian of 1D slices through the peak at 4 orientations.

    For each orientation the slice samples the surface at the peak and at
    +-p pixels along the orientation (rounded to the grid), applying the
    1/4 * [1 -2 1] operator.  Samples falling outside the surface clamp to
    the nearest edge value.
    """
    if p <= 0:
        raise ValueError("scale p must be positive")
    v = response.values if isinstance(response, NccResponse) else np.asarray(response)
    h, w = v.shape
    px, py = peak
    if not (0 <= px < w and 0 <= py < h):
        raise ValueError(f"peak {peak} outside response of shape {(h, w)}")
    out = np.empty(4)
    for i, ang in enumerate(_LAPLACE_ANGLES):
        dx = int(round(p * np.cos(ang)))
        dy = int(round(p * np.sin(ang)))
        ahead = v[min(max(py + dy, 0), h - 1), min(max(px + dx, 0), w - 1)]
        behind = v[min(max(py - dy, 0), h - 1), min(max(px - dx, 0), w - 1)]
        out[i] = (behind - 2.0 * v[py, px] + ahead) / 4.0
    return out


@dataclasses.dataclass(frozen=True)
class GaborFilter:
    lam: float
    theta: float
    sigma: float
    gamma: float
    kernel: np.ndarray


def make_gabor_filter(lam, theta, sigma, gamma):
    """Real Gabor kernel: oriented Gaussian envelope times a cosine.

    The kernel is square with half-width ceil(3 * max(sigma, sigma/gamma))
    so it encompasses three standard deviations of the envelope.
    """
    sigma_y = sigma / gamma
    half = int(np.ceil(3.0 * max(sigma, sigma_y)))
    y, x = np.mgrid[-half:half + 1, -half:half + 1].astype(np.float64)
    xr = x * np.cos(theta) + y * np.sin(theta)
    yr = -x * np.sin(theta) + y * np.cos(theta)
    envelope = np.exp(-xr ** 2 / (2.0 * sigma ** 2) - yr ** 2 / (2.0 * sigma_y ** 2))
    kernel = envelope * np.cos(2.0 * np.pi * xr / lam)
    return GaborFilter(lam=lam, theta=theta, sigma=sigma, gamma=gamma, kernel=kernel)


@lru_cache(maxsize=1)
def build_gabor_bank():
    """The fixed 33-filter bank: one coarse isotropic filter plus eight
    orientations for each of four wavelength-10 configurations."""
    bank = [make_gabor_filter(100.0, 0.0, 4.0, 1.0)]
    for sigma, gamma in ((2.0, 1.0), (2.0, 0.5), (3.0, 1.0), (3.0, 0.5)):
        for k in range(8):
            bank.append(make_gabor_filter(10.0, k * np.pi / 4.0, sigma, gamma))
    return tuple(bank)


def gabor_response(values, kernel):
    """Same-size convolution of a response surface with edge clamping."""
    half = kernel.shape[0] // 2
    padded = np.pad(values, half, mode="edge")
    if values.size <= 256:
        from scipy.ndimage import convolve as nd_convolve
        return nd_convolve(values, kernel, mode="nearest")
    return fftconvolve(padded, kernel, mode="valid")


def encode_ncc(response, level):
    """Encode one NCC response as its per-cell feature slice."""
    v = response.values
    if v.size == 0:
        raise ValueError("empty NCC response")
    th, tw = response.template_shape
    zx, zy = response.zero_offset
    px, py = response.peak_coords()

    parts = [np.array([v.min(), v.max(), v.mean()])]
    parts.append(np.array([(px - zx) / tw, (py - zy) / th]))
    for p in LAPLACE_SCALES:
        parts.append(laplace_coords(response, (px, py), p))
    hist, _ = np.histogram(np.clip(v, -1.0, 1.0), bins=HIST_BINS, range=(-1.0, 1.0))
    parts.append(hist / v.size)

    if level <= GABOR_MAX_LEVEL:
        for filt in build_gabor_bank():
            h = gabor_response(v, filt.kernel)
            parts.append(np.array([h.min(), h.max(), h.mean(), np.median(h)]))
    return np.concatenate(parts)


def feature_dim():
    """Length of the feature vector, a constant of the grid/bank config."""
    gabor_cells = sum(l * l for l in GRID_LEVELS if l <= GABOR_MAX_LEVEL)
    bank_size = len(build_gabor_bank())
    return CELL_COUNT * BASE_SLICE_LEN + gabor_cells * bank_size * GABOR_SLICE_LEN


FEATURE_DIM = 121 * BASE_SLICE_LEN + 5 * 33 * GABOR_SLICE_LEN  # 2838


def extract_features(a, b):
    """Full feature vector for the ordered pair (a, b).

    Cells are visited in (level ascending, cell_y, cell_x) order; within a
    cell the base statistics come first and the Gabor block (levels 1 and 2
    only) is appended.  The result length is FEATURE_DIM for any input
    resolution, and extraction is a pure function of the two pixel arrays.
    """
    pa = a.pixels if hasattr(a, "pixels") else np.asarray(a, dtype=np.float64)
    pb = b.pixels if hasattr(b, "pixels") else np.asarray(b, dtype=np.float64)
    if pa.shape != pb.shape:
        raise ValueError(f"frame dimensions differ: {pa.shape} vs {pb.shape}")
    h, w = pa.shape
    slices = []
    for level in GRID_LEVELS:
        for cy in range(level):
            for cx in range(level):
                cell = window_geometry(level, cx, cy, w, h)
                tr, sr = cell.template_rect, cell.search_rect
                template = pa[tr.y0:tr.y1, tr.x0:tr.x1]
                search = pb[sr.y0:sr.y1, sr.x0:sr.x1]
                resp = compute_ncc(template, search,
                                   zero_offset=(tr.x0 - sr.x0, tr.y0 - sr.y0))
                slices.append(encode_ncc(resp, level))
    vec = np.concatenate(slices)
    assert vec.shape == (FEATURE_DIM,)
    return vec


# --- flat binary serialization: 16-byte header + little-endian float32 ---

_FEATURE_MAGIC = b"SMF1"
_FEATURE_VERSION = 1
_HEADER = struct.Struct("<4sIII")


def save_features(path, vec):
    vec = np.asarray(vec, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_FEATURE_MAGIC, _FEATURE_VERSION, vec.size, 0))
        fh.write(vec.tobytes())


def load_features(path):
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise ValueError(f"truncated feature file {path}")
        magic, version, dim, _ = _HEADER.unpack(header)
        if magic != _FEATURE_MAGIC or version != _FEATURE_VERSION:
            raise ValueError(f"bad feature file header in {path}")
        data = np.frombuffer(fh.read(4 * dim), dtype="<f4")
        if data.size != dim:
            raise ValueError(f"truncated feature file {path}")
    return data.astype(np.float64)
