"""Built-in synthetic corpora.

Three generator families, all driven by the package RNG so corpora are
reproducible byte for byte:

* road-like texture patches (the normal class for the patch experiment);
* diverse "natural image" substitutes written in the CIFAR-10 binary
  layout (the anomaly class for the patch experiment);
* handwritten-digit-like glyphs written in the IDX layout, ten classes
  with per-sample warp, stroke and noise variation.

The glyph and natural-image generators stand in for corpora that cannot
be redistributed with the package; they exercise the same file parsers
and training pipeline as the real data.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset, write_cifar10, write_idx_images, write_idx_labels
from .rng import Rng

# 5x7 pixel font; rows top to bottom, 1 = ink.  The 3 is drawn as the
# right half of the 8 and the 5 shares most of its strokes with the 6,
# mirroring how those digit pairs are confusable in handwriting.
_DIGIT_FONT = {
    0: ["01110", "10001", "10011", "10101", "11001", "10001", "01110"],
    1: ["00100", "01100", "00100", "00100", "00100", "00100", "01110"],
    2: ["01110", "10001", "00001", "00010", "00100", "01000", "11111"],
    3: ["01110", "10001", "00001", "00110", "00001", "10001", "01110"],
    4: ["00010", "00110", "01010", "10010", "11111", "00010", "00010"],
    5: ["11110", "10000", "10000", "11110", "00001", "10001", "01110"],
    6: ["00110", "01000", "10000", "11110", "10001", "10001", "01110"],
    7: ["11111", "00001", "00010", "00100", "01000", "01000", "01000"],
    8: ["01110", "10001", "10001", "01110", "10001", "10001", "01110"],
    9: ["01110", "10001", "10001", "01111", "00001", "00010", "01100"],
}

_GLYPHS = {d: np.array([[int(c) for c in row] for row in rows], dtype=np.float64)
           for d, rows in _DIGIT_FONT.items()}


def _value_noise(rng: Rng, size: int, cells: int) -> np.ndarray:
    """Smooth noise in [0,1]: a random grid bilinearly upsampled."""
    g = rng.uniform(cells + 1, cells + 1)
    t = np.linspace(0.0, cells, size)
    i = np.minimum(t.astype(np.int64), cells - 1)
    f = t - i
    rows = g[i, :] * (1.0 - f)[:, None] + g[i + 1, :] * f[:, None]
    return rows[:, i] * (1.0 - f)[None, :] + rows[:, i + 1] * f[None, :]


def _blur3(img: np.ndarray, passes: int = 1) -> np.ndarray:
    """3x3 binomial blur with edge replication."""
    for _ in range(passes):
        p = np.pad(img, 1, mode="edge")
        img = (4 * p[1:-1, 1:-1]
               + 2 * (p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:])
               + p[:-2, :-2] + p[:-2, 2:] + p[2:, :-2] + p[2:, 2:]) / 16.0
    return img


def _affine_warp(img: np.ndarray, angle: float, shear: float, scale: float,
                 shift_y: float, shift_x: float) -> np.ndarray:
    """Bilinear inverse-mapped affine warp about the image center."""
    h, w = img.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ca, sa = np.cos(angle), np.sin(angle)
    # forward = scale * rotation * shear; sample with its inverse
    fwd = scale * np.array([[ca, -sa], [sa, ca]]) @ np.array([[1.0, shear], [0.0, 1.0]])
    inv = np.linalg.inv(fwd)
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    dy = yy - cy - shift_y
    dx = xx - cx - shift_x
    sy = inv[0, 0] * dy + inv[0, 1] * dx + cy
    sx = inv[1, 0] * dy + inv[1, 1] * dx + cx
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    fy = sy - y0
    fx = sx - x0
    out = np.zeros_like(img)
    valid = (y0 >= 0) & (y0 < h - 1) & (x0 >= 0) & (x0 < w - 1)
    y0v, x0v = y0[valid], x0[valid]
    fyv, fxv = fy[valid], fx[valid]
    out[valid] = (img[y0v, x0v] * (1 - fyv) * (1 - fxv)
                  + img[y0v + 1, x0v] * fyv * (1 - fxv)
                  + img[y0v, x0v + 1] * (1 - fyv) * fxv
                  + img[y0v + 1, x0v + 1] * fyv * fxv)
    return out


def _dilate(img: np.ndarray) -> np.ndarray:
    p = np.pad(img, 1)
    return np.maximum.reduce([p[1:-1, 1:-1], p[:-2, 1:-1], p[2:, 1:-1],
                              p[1:-1, :-2], p[1:-1, 2:]])


def digit_image(digit: int, rng: Rng, size: int = 28) -> np.ndarray:
    """One warped, blurred, noisy glyph of the given digit in [0,1].

    The deformations are deliberately strong so the classes share a lot
    of stroke structure, the way handwritten digits do.
    """
    glyph = np.kron(_GLYPHS[digit], np.ones((3, 3)))  # 21x15
    params = rng.random(8)
    for _ in range(int(params[7] * 3)):  # stroke thickness 0..2 dilations
        glyph = _dilate(glyph)
    canvas = np.zeros((size, size))
    oy = (size - glyph.shape[0]) // 2
    ox = (size - glyph.shape[1]) // 2
    canvas[oy:oy + glyph.shape[0], ox:ox + glyph.shape[1]] = glyph
    warped = _affine_warp(
        canvas,
        angle=(params[0] - 0.5) * 0.5,        # up to ~14 degrees
        shear=(params[1] - 0.5) * 0.5,
        scale=0.8 + 0.4 * params[2],
        shift_y=(params[3] - 0.5) * 4.0,
        shift_x=(params[4] - 0.5) * 4.0,
    )
    img = _blur3(warped, passes=1 + int(params[5] < 0.5))
    img *= 0.7 + 0.3 * params[6]
    img += rng.uniform(size, size, -0.05, 0.05)
    return np.clip(img, 0.0, 1.0)


def digit_dataset(labels, rng: Rng, size: int = 28) -> Dataset:
    """Glyph images for the given label sequence."""
    labels = np.asarray(labels, dtype=np.int64)
    out = np.empty((len(labels), size * size))
    for k, d in enumerate(labels):
        out[k] = digit_image(int(d), rng, size).ravel()
    return Dataset(out, labels, source="synthetic-digits", image_shape=(size, size))


def write_digit_corpus(images_path, labels_path, n: int, rng: Rng,
                       size: int = 28) -> None:
    """Write an n-image balanced glyph corpus as an IDX image/label pair."""
    labels = np.asarray([i % 10 for i in range(n)], dtype=np.int64)
    labels = labels[rng.permutation(n)]
    ds = digit_dataset(labels, rng, size)
    u8 = np.clip(np.round(ds.samples * 255.0), 0, 255).astype(np.uint8)
    write_idx_images(images_path, u8, (size, size))
    write_idx_labels(labels_path, labels)


def road_texture_patch(rng: Rng, size: int = 32) -> np.ndarray:
    """One asphalt-like patch: mid-gray base, fine grain, occasional
    bright lane stripe."""
    params = rng.random(4)
    base = 0.35 + 0.2 * params[0]
    img = np.full((size, size), base)
    img += (_value_noise(rng, size, 8) - 0.5) * 0.10
    img += rng.uniform(size, size, -0.03, 0.03)
    img += (params[1] - 0.5) * 0.06 * np.linspace(-1, 1, size)[:, None]
    if params[2] < 0.25:  # lane marking: bright, roughly vertical band
        stripe = rng.random(3)
        x0 = stripe[0] * (size - 6)
        width = 2.0 + 3.0 * stripe[1]
        slope = (stripe[2] - 0.5) * 0.4
        cols = np.arange(size)[None, :] - (x0 + slope * np.arange(size)[:, None])
        band = np.clip(1.0 - np.abs(cols - width / 2) / (width / 2), 0.0, 1.0)
        img += 0.35 * band
    return np.clip(img, 0.0, 1.0)


def road_texture_dataset(n: int, rng: Rng, size: int = 32) -> Dataset:
    out = np.empty((n, size * size))
    for k in range(n):
        out[k] = road_texture_patch(rng, size).ravel()
    return Dataset(out, source="synthetic-textures", image_shape=(size, size))


def natural_rgb_images(n: int, rng: Rng) -> tuple[np.ndarray, np.ndarray]:
    """Diverse colorful 32x32 images as (n, 3, 1024) uint8 plus labels.

    Each image mixes a smooth random color field, a couple of solid
    shapes and pixel noise; as a population they are far more varied
    than the road textures.
    """
    out = np.empty((n, 3, 1024), dtype=np.uint8)
    labels = np.empty(n, dtype=np.int64)
    for k in range(n):
        chans = []
        cells = int(2 + rng.integers(6, 1)[0])
        for _ in range(3):
            level = rng.random(2)
            chan = level[0] * 0.6 + 0.2 + (_value_noise(rng, 32, cells) - 0.5) * (0.3 + 0.6 * level[1])
            chans.append(chan)
        img = np.stack(chans)
        n_shapes = int(rng.integers(3, 1)[0]) + 1
        for _ in range(n_shapes):
            geom = rng.random(4)
            color = rng.random(3)
            y0 = int(geom[0] * 24)
            x0 = int(geom[1] * 24)
            hh = 4 + int(geom[2] * 20)
            ww = 4 + int(geom[3] * 20)
            img[:, y0:y0 + hh, x0:x0 + ww] = color[:, None, None]
        img += rng.uniform(32, 32 * 3, -0.06, 0.06).reshape(3, 32, 32)
        out[k] = (np.clip(img, 0.0, 1.0).reshape(3, 1024) * 255.0).round().astype(np.uint8)
        labels[k] = int(rng.integers(10, 1)[0])
    return out, labels


def write_natural_corpus(path, n: int, rng: Rng) -> None:
    """Write n synthetic natural images as a CIFAR-10 binary batch."""
    imgs, labels = natural_rgb_images(n, rng)
    write_cifar10(path, imgs, labels)


def bar_patterns() -> tuple[np.ndarray, np.ndarray]:
    """Two disjoint 4x4 binary pattern families: axis-aligned bars
    (rows+columns, 8 patterns) and diagonal bars (2 patterns)."""
    axis = []
    for i in range(4):
        m = np.zeros((4, 4))
        m[i, :] = 1.0
        axis.append(m.ravel())
    for j in range(4):
        m = np.zeros((4, 4))
        m[:, j] = 1.0
        axis.append(m.ravel())
    diag = [np.eye(4).ravel(), np.fliplr(np.eye(4)).ravel()]
    return np.array(axis), np.array(diag)
