"""Binary container for models and cached datasets, plus a JSON variant.

Layout (everything little-endian):

    bytes 0-3   magic b"NLMF"
    byte  4-7   format version, u32 (currently 1)
    byte  8     kind: 1 = RBM, 2 = dense autoencoder, 3 = dataset
    then a kind-specific header followed by raw float64 data:

    RBM:     u32 n_visible, u32 n_hidden,
             weights (n_visible*n_hidden), visible_bias, hidden_bias
    dense:   u32 n_in, u32 n_hidden, u8 output_activation (0 identity,
             1 sigmoid), encoder_weights, encoder_bias,
             decoder_weights, decoder_bias
    dataset: u32 rows, u32 cols, u8 has_labels, u8 has_normalization,
             i32 image_h, i32 image_w (0,0 when unknown),
             [f64 mean, f64 std], samples, [labels as i64]

Matrices are stored row-major.  The JSON variant mirrors the same
fields with parameters as nested lists; it exists for debugging and is
not meant for large models.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .data import Dataset, NormalizationRecord
from .dense import IDENTITY, SIGMOID, DenseAutoencoder
from .errors import DataFormatError
from .rbm import RbmModel

MAGIC = b"NLMF"
VERSION = 1
KIND_RBM = 1
KIND_DENSE = 2
KIND_DATASET = 3

_ACT_CODE = {IDENTITY: 0, SIGMOID: 1}
_ACT_NAME = {0: IDENTITY, 1: SIGMOID}


def _f64(arr: np.ndarray) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


class _Reader:
    def __init__(self, path):
        self.path = path
        with open(path, "rb") as f:
            self.buf = f.read()
        self.pos = 0

    def bytes(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.buf):
            raise DataFormatError(
                f"{self.path}: truncated while reading {what} at byte offset "
                f"{self.pos} (wanted {n} bytes, had {len(self.buf) - self.pos})")
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.bytes(struct.calcsize(fmt), what))

    def f64(self, count: int, what: str) -> np.ndarray:
        raw = self.bytes(8 * count, what)
        return np.frombuffer(raw, dtype="<f8").astype(np.float64)

    def done(self):
        if self.pos != len(self.buf):
            raise DataFormatError(
                f"{self.path}: {len(self.buf) - self.pos} trailing bytes at "
                f"offset {self.pos}")


def _header(kind: int) -> bytes:
    return MAGIC + struct.pack("<IB", VERSION, kind)


def _read_header(r: _Reader) -> int:
    magic = r.bytes(4, "magic")
    if magic != MAGIC:
        raise DataFormatError(
            f"{r.path}: bad magic {magic!r} at byte offset 0 (expected {MAGIC!r})")
    version, kind = r.unpack("<IB", "version/kind")
    if version != VERSION:
        raise DataFormatError(f"{r.path}: unsupported format version {version}")
    return kind


def save_model(path, model) -> None:
    with open(path, "wb") as f:
        if isinstance(model, RbmModel):
            f.write(_header(KIND_RBM))
            f.write(struct.pack("<II", model.n_visible, model.n_hidden))
            f.write(_f64(model.weights))
            f.write(_f64(model.visible_bias))
            f.write(_f64(model.hidden_bias))
        elif isinstance(model, DenseAutoencoder):
            f.write(_header(KIND_DENSE))
            f.write(struct.pack("<IIB", model.n_in, model.n_hidden,
                                _ACT_CODE[model.output_activation]))
            for p in model.params():
                f.write(_f64(p))
        else:
            raise TypeError(f"cannot serialize {type(model).__name__}")


def load_model(path):
    r = _Reader(path)
    kind = _read_header(r)
    if kind == KIND_RBM:
        nv, nh = r.unpack("<II", "dims")
        model = RbmModel(
            weights=r.f64(nv * nh, "weights").reshape(nv, nh),
            visible_bias=r.f64(nv, "visible_bias"),
            hidden_bias=r.f64(nh, "hidden_bias"),
        )
    elif kind == KIND_DENSE:
        n_in, n_hidden, act = r.unpack("<IIB", "dims")
        if act not in _ACT_NAME:
            raise DataFormatError(f"{path}: unknown activation code {act}")
        model = DenseAutoencoder(
            encoder_weights=r.f64(n_in * n_hidden, "encoder_weights").reshape(n_in, n_hidden),
            encoder_bias=r.f64(n_hidden, "encoder_bias"),
            decoder_weights=r.f64(n_hidden * n_in, "decoder_weights").reshape(n_hidden, n_in),
            decoder_bias=r.f64(n_in, "decoder_bias"),
            output_activation=_ACT_NAME[act],
        )
    else:
        raise DataFormatError(f"{path}: not a model file (kind {kind})")
    r.done()
    return model


def save_dataset(path, ds: Dataset) -> None:
    with open(path, "wb") as f:
        f.write(_header(KIND_DATASET))
        rows, cols = ds.samples.shape
        img_h, img_w = ds.image_shape if ds.image_shape else (0, 0)
        f.write(struct.pack("<IIBBii", rows, cols,
                            ds.labels is not None,
                            ds.normalization is not None,
                            img_h, img_w))
        if ds.normalization is not None:
            f.write(struct.pack("<dd", ds.normalization.mean, ds.normalization.std))
        f.write(_f64(ds.samples))
        if ds.labels is not None:
            f.write(np.ascontiguousarray(ds.labels, dtype="<i8").tobytes())


def load_dataset(path) -> Dataset:
    r = _Reader(path)
    kind = _read_header(r)
    if kind != KIND_DATASET:
        raise DataFormatError(f"{path}: not a dataset file (kind {kind})")
    rows, cols, has_labels, has_norm, img_h, img_w = r.unpack("<IIBBii", "dims")
    norm = None
    if has_norm:
        mean, std = r.unpack("<dd", "normalization")
        norm = NormalizationRecord(mean, std)
    samples = r.f64(rows * cols, "samples").reshape(rows, cols)
    labels = None
    if has_labels:
        labels = np.frombuffer(r.bytes(8 * rows, "labels"), dtype="<i8").astype(np.int64)
    r.done()
    return Dataset(samples, labels, source=str(path),
                   image_shape=(img_h, img_w) if img_h else None,
                   normalization=norm)


def save_model_json(path, model) -> None:
    """Human-inspectable variant of the model container."""
    if isinstance(model, RbmModel):
        payload = {
            "kind": "rbm",
            "n_visible": model.n_visible,
            "n_hidden": model.n_hidden,
            "weights": model.weights.tolist(),
            "visible_bias": model.visible_bias.tolist(),
            "hidden_bias": model.hidden_bias.tolist(),
        }
    elif isinstance(model, DenseAutoencoder):
        payload = {
            "kind": "dense",
            "n_in": model.n_in,
            "n_hidden": model.n_hidden,
            "output_activation": model.output_activation,
            "encoder_weights": model.encoder_weights.tolist(),
            "encoder_bias": model.encoder_bias.tolist(),
            "decoder_weights": model.decoder_weights.tolist(),
            "decoder_bias": model.decoder_bias.tolist(),
        }
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    with open(path, "w") as f:
        json.dump(payload, f)
        f.write("\n")


def load_model_json(path):
    with open(path) as f:
        payload = json.load(f)
    kind = payload.get("kind")
    if kind == "rbm":
        return RbmModel(
            weights=np.array(payload["weights"], dtype=np.float64),
            visible_bias=np.array(payload["visible_bias"], dtype=np.float64),
            hidden_bias=np.array(payload["hidden_bias"], dtype=np.float64),
        )
    if kind == "dense":
        return DenseAutoencoder(
            encoder_weights=np.array(payload["encoder_weights"], dtype=np.float64),
            encoder_bias=np.array(payload["encoder_bias"], dtype=np.float64),
            decoder_weights=np.array(payload["decoder_weights"], dtype=np.float64),
            decoder_bias=np.array(payload["decoder_bias"], dtype=np.float64),
            output_activation=payload["output_activation"],
        )
    raise DataFormatError(f"{path}: unknown model kind {kind!r}")
