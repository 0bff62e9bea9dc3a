"""Dataset ingestion, patch extraction, normalization and splitting.

File formats read: IDX image/label files (big-endian dims, unsigned
bytes), CIFAR-10 binary batches (3073-byte records, grayscale-converted
on load) and binary PGM (P5).  Writers for IDX and PGM exist so
synthetic corpora take the same ingestion path as real ones.

All parsers reject malformed input with an error naming the byte
offset; no partially-read dataset is ever returned.  Every randomized
operation draws from an explicit :class:`~neglearn.rng.Rng`.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace

import numpy as np

from .errors import DataFormatError, ShapeError
from .rng import Rng

IDX_MAGIC_IMAGES = 0x00000803
IDX_MAGIC_LABELS = 0x00000801
CIFAR_RECORD_BYTES = 3073
# ITU-R BT.601 luma weights for grayscale conversion
_LUMA = np.array([0.299, 0.587, 0.114])

FEATURELESS_STD = 0.02


@dataclass(frozen=True)
class NormalizationRecord:
    """Global scalar statistics computed over training pixels only."""

    mean: float
    std: float

    def __post_init__(self):
        if self.std <= 0:
            raise ValueError("normalization std must be > 0")


@dataclass(frozen=True)
class Dataset:
    """Rows of flattened images plus optional labels and provenance."""

    samples: np.ndarray
    labels: np.ndarray | None = None
    source: str = ""
    image_shape: tuple[int, int] | None = None
    normalization: NormalizationRecord | None = None

    def __post_init__(self):
        if self.samples.ndim != 2:
            raise ShapeError(f"samples must be 2-D, got shape {self.samples.shape}")
        if self.labels is not None and len(self.labels) != len(self.samples):
            raise ShapeError("labels must align with samples")

    def __len__(self):
        return len(self.samples)

    @property
    def width(self) -> int:
        return self.samples.shape[1]


def _read_exact(f, n: int, path, what: str) -> bytes:
    buf = f.read(n)
    if len(buf) != n:
        raise DataFormatError(
            f"{path}: truncated while reading {what} at byte offset "
            f"{f.tell() - len(buf)} (wanted {n} bytes, got {len(buf)})")
    return buf


def load_idx(images_path, labels_path=None) -> Dataset:
    """Load an IDX image file (pixels scaled to [0,1]); labels optional.

    MNIST-style corpora keep labels in a separate IDX file; pass it as
    ``labels_path`` to attach them.
    """
    with open(images_path, "rb") as f:
        magic, = struct.unpack(">I", _read_exact(f, 4, images_path, "magic"))
        if magic != IDX_MAGIC_IMAGES:
            raise DataFormatError(
                f"{images_path}: bad image magic {magic:#010x} at byte offset 0 "
                f"(expected {IDX_MAGIC_IMAGES:#010x})")
        n, rows, cols = struct.unpack(">III", _read_exact(f, 12, images_path, "dims"))
        if rows == 0 or cols == 0 or n > 1 << 31 or rows * cols > 1 << 24:
            raise DataFormatError(
                f"{images_path}: implausible dimensions {n}x{rows}x{cols}")
        raw = _read_exact(f, n * rows * cols, images_path, "pixel data")
        extra = f.read(1)
        if extra:
            raise DataFormatError(
                f"{images_path}: {len(extra)}+ trailing bytes at offset {16 + n * rows * cols}")
    pixels = np.frombuffer(raw, dtype=np.uint8).astype(np.float64) / 255.0
    labels = load_idx_labels(labels_path) if labels_path is not None else None
    if labels is not None and len(labels) != n:
        raise DataFormatError(
            f"{labels_path}: {len(labels)} labels for {n} images")
    return Dataset(pixels.reshape(n, rows * cols), labels,
                   source=str(images_path), image_shape=(rows, cols))


def load_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as f:
        magic, = struct.unpack(">I", _read_exact(f, 4, path, "magic"))
        if magic != IDX_MAGIC_LABELS:
            raise DataFormatError(
                f"{path}: bad label magic {magic:#010x} at byte offset 0 "
                f"(expected {IDX_MAGIC_LABELS:#010x})")
        n, = struct.unpack(">I", _read_exact(f, 4, path, "count"))
        raw = _read_exact(f, n, path, "label data")
    return np.frombuffer(raw, dtype=np.uint8).astype(np.int64)


def write_idx_images(path, images: np.ndarray, image_shape: tuple[int, int]):
    """Write uint8 images (n, rows*cols) in IDX layout."""
    rows, cols = image_shape
    imgs = np.asarray(images)
    if imgs.dtype != np.uint8:
        raise ValueError("IDX image data must be uint8")
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", IDX_MAGIC_IMAGES, len(imgs), rows, cols))
        f.write(imgs.tobytes())


def write_idx_labels(path, labels):
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() > 255):
        raise ValueError("IDX labels must fit in a byte")
    with open(path, "wb") as f:
        f.write(struct.pack(">II", IDX_MAGIC_LABELS, len(labels)))
        f.write(labels.astype(np.uint8).tobytes())


def load_cifar10(path) -> Dataset:
    """Load one CIFAR-10 binary batch, grayscale-converted, rows of width 1024."""
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) == 0 or len(raw) % CIFAR_RECORD_BYTES != 0:
        raise DataFormatError(
            f"{path}: size {len(raw)} is not a positive multiple of "
            f"{CIFAR_RECORD_BYTES} bytes (offset of partial record: "
            f"{len(raw) - len(raw) % CIFAR_RECORD_BYTES})")
    records = np.frombuffer(raw, dtype=np.uint8).reshape(-1, CIFAR_RECORD_BYTES)
    labels = records[:, 0].astype(np.int64)
    planes = records[:, 1:].reshape(-1, 3, 1024).astype(np.float64) / 255.0
    gray = np.einsum("ncp,c->np", planes, _LUMA)
    return Dataset(np.ascontiguousarray(gray), labels,
                   source=str(path), image_shape=(32, 32))


def write_cifar10(path, rgb_images: np.ndarray, labels):
    """Write uint8 RGB images (n, 3, 1024) as a CIFAR-10 binary batch."""
    imgs = np.asarray(rgb_images)
    labels = np.asarray(labels)
    if imgs.dtype != np.uint8 or imgs.shape[1:] != (3, 1024):
        raise ValueError("CIFAR image data must be uint8 with shape (n, 3, 1024)")
    records = np.concatenate(
        [labels.astype(np.uint8).reshape(-1, 1), imgs.reshape(len(imgs), 3072)], axis=1)
    with open(path, "wb") as f:
        f.write(records.tobytes())


def load_pgm(path) -> np.ndarray:
    """Read a binary (P5) PGM image as a 2-D array scaled to [0,1]."""
    with open(path, "rb") as f:
        data = f.read()
    fields, pos = [], 0
    while len(fields) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DataFormatError(f"{path}: truncated PGM header at byte offset {pos}")
        fields.append(data[start:pos])
    pos += 1  # single whitespace byte after maxval
    if fields[0] != b"P5":
        raise DataFormatError(f"{path}: not a binary PGM (P5) file at byte offset 0")
    try:
        width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    except ValueError:
        raise DataFormatError(f"{path}: non-numeric PGM header field")
    if maxval != 255:
        raise DataFormatError(f"{path}: only maxval 255 is supported, got {maxval}")
    expected = width * height
    pixels = data[pos:pos + expected]
    if len(pixels) != expected:
        raise DataFormatError(
            f"{path}: truncated pixel data at byte offset {pos + len(pixels)} "
            f"(wanted {expected} bytes, got {len(pixels)})")
    arr = np.frombuffer(pixels, dtype=np.uint8).astype(np.float64) / 255.0
    return arr.reshape(height, width)


def write_pgm(path, image: np.ndarray):
    """Write a 2-D array with values in [0,1] as binary PGM."""
    img = np.asarray(image)
    if img.ndim != 2:
        raise ShapeError("PGM image must be 2-D")
    u8 = np.clip(np.round(img * 255.0), 0, 255).astype(np.uint8)
    with open(path, "wb") as f:
        f.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode())
        f.write(u8.tobytes())


def extract_patches(image: np.ndarray, patch_size: int, n: int, rng: Rng,
                    reject_featureless: bool = False,
                    std_threshold: float = FEATURELESS_STD,
                    max_attempts_per_patch: int = 50) -> Dataset:
    """n random patches at uniform top-left offsets from one image.

    With ``reject_featureless``, patches whose pixel standard deviation
    falls below ``std_threshold`` are resampled; the retry budget is
    ``n * max_attempts_per_patch`` draws overall.
    """
    img = np.asarray(image, dtype=np.float64)
    if img.ndim != 2:
        raise ShapeError("patch extraction expects a 2-D image")
    h, w = img.shape
    if h < patch_size or w < patch_size:
        raise ShapeError(
            f"image {h}x{w} is smaller than patch size {patch_size}")
    if n < 1:
        raise ValueError("n must be >= 1")
    out = np.empty((n, patch_size * patch_size))
    budget = n * max_attempts_per_patch
    kept = 0
    while kept < n:
        if budget <= 0:
            raise ValueError(
                f"featureless-patch retry budget exhausted after keeping {kept}/{n} "
                f"(pixel std threshold {std_threshold})")
        budget -= 1
        i = int(rng.integers(h - patch_size + 1, 1)[0])
        j = int(rng.integers(w - patch_size + 1, 1)[0])
        patch = img[i:i + patch_size, j:j + patch_size]
        if reject_featureless and patch.std() < std_threshold:
            continue
        out[kept] = patch.ravel()
        kept += 1
    return Dataset(out, source="patches", image_shape=(patch_size, patch_size))


def normalize(train: Dataset, others: tuple[Dataset, ...] = ()):
    """Subtract the train-pixel mean and divide by the train-pixel
    (population) standard deviation; the same record is applied to every
    other dataset.  Returns (train', others', record)."""
    if len(train) == 0:
        raise ValueError("cannot normalize an empty training set")
    mean = float(np.mean(train.samples))
    std = float(np.std(train.samples))
    if std == 0.0:
        raise ValueError("training data is constant (zero standard deviation)")
    record = NormalizationRecord(mean, std)
    normed = apply_normalization(train, record)
    others_normed = tuple(apply_normalization(d, record) for d in others)
    return normed, others_normed, record


def apply_normalization(ds: Dataset, record: NormalizationRecord) -> Dataset:
    return replace(ds, samples=(ds.samples - record.mean) / record.std,
                   normalization=record)


def split(ds: Dataset, train_fraction: float, rng: Rng):
    """Deterministic shuffled partition into (train, test)."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(ds)
    n_train = int(round(n * train_fraction))
    if n_train == 0 or n_train == n:
        raise ValueError(
            f"fraction {train_fraction} leaves an empty side for {n} rows")
    order = rng.permutation(n)
    return _select(ds, order[:n_train]), _select(ds, order[n_train:])


def _select(ds: Dataset, idx: np.ndarray) -> Dataset:
    labels = ds.labels[idx] if ds.labels is not None else None
    return replace(ds, samples=ds.samples[idx], labels=labels)


def filter_labels(ds: Dataset, include) -> Dataset:
    """Rows whose label is in ``include``, original order preserved."""
    if ds.labels is None:
        raise ValueError("dataset has no labels to filter on")
    include = set(int(v) for v in include)
    mask = np.isin(ds.labels, sorted(include))
    return _select(ds, np.nonzero(mask)[0])


def take(ds: Dataset, n: int) -> Dataset:
    """First n rows in stored order."""
    if n < 0 or n > len(ds):
        raise ValueError(f"cannot take {n} of {len(ds)} rows")
    return _select(ds, np.arange(n))


def subsample(ds: Dataset, n: int, rng: Rng) -> Dataset:
    """n rows drawn without replacement, in random order."""
    if n < 0 or n > len(ds):
        raise ValueError(f"cannot subsample {n} of {len(ds)} rows")
    return _select(ds, rng.permutation(len(ds))[:n])
