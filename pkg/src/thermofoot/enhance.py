"""Grayscale conversion and contrast enhancement of plantar thermograms.

All operators act on foreground pixels only; background pixels stay 0 and
never enter a histogram.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, EmptyMapError, ShapeError

T_RANGE = (20.0, 36.0)
OPERATORS = ("original", "he", "ahe", "gamma")


@dataclass(frozen=True)
class GrayImage:
    """8-bit intensities with a foreground mask; background pixels are 0."""

    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        m = np.asarray(self.mask, dtype=bool)
        if v.ndim != 2 or v.shape != m.shape:
            raise ShapeError("values and mask must be 2-D arrays of the same shape")
        if v.dtype != np.uint8:
            if np.any((v < 0) | (v > 255)) or np.any(v != np.round(v)):
                raise ShapeError("intensities must be integers in 0..255")
            v = v.astype(np.uint8)
        v = np.where(m, v, 0).astype(np.uint8)
        v.setflags(write=False)
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "mask", m)

    @property
    def shape(self):
        return self.values.shape

    @property
    def foreground(self):
        return self.values[self.mask]

    def __eq__(self, other):
        return (isinstance(other, GrayImage) and np.array_equal(self.values, other.values)
                and np.array_equal(self.mask, other.mask))

    def __hash__(self):
        return hash((self.values.tobytes(), self.mask.tobytes()))


def _round_half_up(x):
    return np.floor(np.asarray(x, dtype=float) + 0.5)


def quantize_grayscale(foot_map, t_min=T_RANGE[0], t_max=T_RANGE[1]):
    """Linear map of [t_min, t_max] degrees onto 0..255, clamped, rounded half up."""
    if not t_min < t_max:
        raise ConfigError(f"t_min must be below t_max, got {t_min} and {t_max}")
    t = np.asarray(foot_map.temps, dtype=float)
    scaled = np.clip((t - t_min) / (t_max - t_min) * 255.0, 0.0, 255.0)
    return GrayImage(_round_half_up(scaled).astype(np.uint8), foot_map.mask)


def _check_foreground(img):
    if not img.mask.any():
        raise EmptyMapError("image has no foreground pixels")


def _fractions(values):
    """Histogram over 0..255 as fractions of the pixel count."""
    return np.bincount(values, minlength=256) / values.size


def _clip(h, clip_limit):
    """Clip a fractional histogram and spread the excess over all levels (one pass)."""
    if clip_limit >= 1.0:
        return h
    excess = np.maximum(h - clip_limit, 0.0).sum()
    return np.minimum(h, clip_limit) + excess / 256.0


def _lut(h):
    """Level -> round(255 * cdf(level))."""
    return np.clip(_round_half_up(255.0 * np.cumsum(h)), 0, 255)


def histogram_equalize(img):
    """Global equalization with the cumulative distribution of foreground pixels."""
    _check_foreground(img)
    lut = _lut(_fractions(img.foreground))
    return GrayImage(lut[img.values].astype(np.uint8), img.mask)


def _tile_edges(n, k):
    return np.floor(np.linspace(0, n, k + 1) + 0.5).astype(int)


def _axis_weights(n, centers):
    """Lower tile index, upper tile index and upper weight for each coordinate."""
    pos = np.arange(n, dtype=float)
    lo = np.clip(np.searchsorted(centers, pos, side="right") - 1, 0, len(centers) - 1)
    hi = np.minimum(lo + 1, len(centers) - 1)
    span = centers[hi] - centers[lo]
    w = np.where(span > 0, (pos - centers[lo]) / np.where(span > 0, span, 1.0), 0.0)
    return lo, hi, np.clip(w, 0.0, 1.0)


def adaptive_equalize(img, tiles=(8, 8), clip_limit=0.01):
    """Contrast-limited equalization over a grid of tiles.

    Each tile's foreground histogram, as fractions of the tile's foreground
    count, is clipped at ``clip_limit`` and the excess spread evenly over the
    256 levels once. Every pixel blends the rounded mappings of the four
    nearest tile centres bilinearly. A tile without foreground uses the
    clipped mapping of the whole image. A tile grid finer than the image
    falls back to a single tile.
    """
    ty, tx = (tiles, tiles) if np.isscalar(tiles) else tuple(tiles)
    ty, tx = int(ty), int(tx)
    if ty < 1 or tx < 1:
        raise ConfigError(f"tiles must be >= 1 in both directions, got {tiles}")
    if not 0.0 < clip_limit <= 1.0:
        raise ConfigError(f"clip_limit must lie in (0, 1], got {clip_limit}")
    _check_foreground(img)
    rows, cols = img.shape
    if ty > rows or tx > cols:
        ty, tx = 1, 1
    v, m = img.values, img.mask
    global_lut = _lut(_clip(_fractions(img.foreground), clip_limit))
    re, ce = _tile_edges(rows, ty), _tile_edges(cols, tx)
    luts = np.empty((ty, tx, 256))
    for i in range(ty):
        for j in range(tx):
            block = v[re[i]:re[i + 1], ce[j]:ce[j + 1]][m[re[i]:re[i + 1], ce[j]:ce[j + 1]]]
            luts[i, j] = global_lut if block.size == 0 else _lut(_clip(_fractions(block), clip_limit))
    r_lo, r_hi, wr = _axis_weights(rows, (re[:-1] + re[1:]) / 2.0 - 0.5)
    c_lo, c_hi, wc = _axis_weights(cols, (ce[:-1] + ce[1:]) / 2.0 - 0.5)
    R_lo, C_lo = np.meshgrid(r_lo, c_lo, indexing="ij")
    R_hi, C_hi = np.meshgrid(r_hi, c_hi, indexing="ij")
    WR, WC = np.meshgrid(wr, wc, indexing="ij")
    out = ((1 - WR) * (1 - WC) * luts[R_lo, C_lo, v] + (1 - WR) * WC * luts[R_lo, C_hi, v]
           + WR * (1 - WC) * luts[R_hi, C_lo, v] + WR * WC * luts[R_hi, C_hi, v])
    out = np.clip(_round_half_up(out), 0, 255).astype(np.uint8)
    return GrayImage(out, m)


def gamma_correct(img, gamma):
    """``i -> round(255 * (i / 255) ** gamma)`` on foreground pixels."""
    if not gamma > 0:
        raise ConfigError(f"gamma must be positive, got {gamma}")
    lut = np.clip(_round_half_up(255.0 * (np.arange(256) / 255.0) ** gamma), 0, 255)
    return GrayImage(lut[img.values].astype(np.uint8), img.mask)


def apply_operator(img, operator, tiles=(8, 8), clip_limit=0.01, gamma=0.8):
    if operator == "original":
        return img
    if operator == "he":
        return histogram_equalize(img)
    if operator == "ahe":
        return adaptive_equalize(img, tiles, clip_limit)
    if operator == "gamma":
        return gamma_correct(img, gamma)
    raise ConfigError(f"unknown operator {operator!r}; expected one of {OPERATORS}")


def save_png(img, path):
    from PIL import Image

    Image.fromarray(np.ascontiguousarray(img.values), mode="L").save(path, format="PNG")


def export_enhanced(subjects, out_dir, operators=OPERATORS, t_range=T_RANGE, tiles=(8, 8),
                    clip_limit=0.01, gamma=0.8, workers=1):
    """Write ``{subject}_{side}_{operator}.png`` for every foot and operator.

    Returns the written paths in subject, foot, operator order.
    """
    for op in operators:
        if op not in OPERATORS:
            raise ConfigError(f"unknown operator {op!r}; expected one of {OPERATORS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(s.subject_id, f) for s in subjects for f in s.feet]

    def render(job):
        sid, foot = job
        gray = quantize_grayscale(foot.foot_map, *t_range)
        paths = []
        for op in operators:
            p = out / f"{sid}_{foot.foot_side}_{op}.png"
            save_png(apply_operator(gray, op, tiles, clip_limit, gamma), p)
            paths.append(p)
        return paths

    with ThreadPoolExecutor(max(1, int(workers))) as pool:
        return [p for paths in pool.map(render, jobs) for p in paths]
