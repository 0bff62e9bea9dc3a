"""Single-layer RBM autoencoder trained by sign-controllable CD-1.

One contrastive-divergence step with a sign knob:

    dW = sign * lr * (v0.T @ h0 - v1.T @ h1) / batch_size

with sign=+1 learning to reconstruct the batch and sign=-1 unlearning
it.  ``h0`` is the hidden response to the data (a stochastic binary
sample or the mean-field probabilities, per config), ``v1`` the visible
reconstruction from ``h0`` and ``h1`` the hidden response to ``v1``;
bias deltas are the corresponding row means.

Model values are immutable: every update returns a new model.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .errors import NumericError, ShapeError
from .rng import Rng

MEAN_FIELD = "mean-field"
STOCHASTIC = "stochastic-binary"


@dataclass(frozen=True)
class RbmModel:
    """Weights (n_visible, n_hidden) plus the two bias vectors."""

    weights: np.ndarray
    visible_bias: np.ndarray
    hidden_bias: np.ndarray

    def __post_init__(self):
        w = self.weights
        if w.ndim != 2:
            raise ShapeError(f"weights must be 2-D, got shape {w.shape}")
        if self.visible_bias.shape != (w.shape[0],):
            raise ShapeError("visible_bias length must equal weight rows")
        if self.hidden_bias.shape != (w.shape[1],):
            raise ShapeError("hidden_bias length must equal weight cols")
        for p in (w, self.visible_bias, self.hidden_bias):
            if not np.isfinite(p).all():
                raise NumericError("model parameters must be finite")

    @property
    def n_visible(self) -> int:
        return self.weights.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class CdConfig:
    """CD-1 step configuration; ``zeta`` is the update sign."""

    learning_rate: float = 0.1
    zeta: int = 1
    hidden_sampling: str = STOCHASTIC

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.zeta not in (1, -1):
            raise ValueError(f"zeta must be +1 or -1, got {self.zeta}")
        if self.hidden_sampling not in (STOCHASTIC, MEAN_FIELD):
            raise ValueError(f"unknown hidden_sampling {self.hidden_sampling!r}")


def init_rbm(n_visible: int, n_hidden: int, rng: Rng, scale: float = 0.01) -> RbmModel:
    """Small symmetric uniform weights in [-scale, scale], zero biases."""
    if n_visible < 1 or n_hidden < 1:
        raise ValueError("layer sizes must be >= 1")
    w = rng.uniform(n_visible, n_hidden, -scale, scale)
    return RbmModel(w, np.zeros(n_visible), np.zeros(n_hidden))


def _check_width(v: np.ndarray, width: int, what: str):
    if v.ndim != 2 or v.shape[1] != width:
        raise ShapeError(f"{what}: expected {width} columns, got shape {v.shape}")


def encode(model: RbmModel, v: np.ndarray) -> np.ndarray:
    """Hidden unit probabilities sigmoid(v @ W + hidden_bias)."""
    _check_width(v, model.n_visible, "encode")
    return linalg.sigmoid(linalg.matmul(v, model.weights) + model.hidden_bias)


def decode(model: RbmModel, h: np.ndarray) -> np.ndarray:
    """Visible reconstruction probabilities sigmoid(h @ W.T + visible_bias)."""
    _check_width(h, model.n_hidden, "decode")
    return linalg.sigmoid(linalg.matmul_nt(h, model.weights) + model.visible_bias)


def reconstruct(model: RbmModel, v: np.ndarray) -> np.ndarray:
    """Deterministic mean-field round trip decode(encode(v))."""
    return decode(model, encode(model, v))


def cd1_delta(model: RbmModel, batch: np.ndarray, cfg: CdConfig, rng: Rng | None = None):
    """Unscaled CD-1 statistics (dw, dvb, dhb) for one batch.

    Positive values point in the direction that improves reconstruction
    of the batch; callers apply ``zeta * learning_rate``.
    """
    _check_width(batch, model.n_visible, "cd1")
    if batch.shape[0] < 1:
        raise ShapeError("cd1: batch must contain at least one row")
    h0 = encode(model, batch)
    if cfg.hidden_sampling == STOCHASTIC:
        if rng is None:
            raise ValueError("stochastic hidden sampling requires an rng")
        h0 = rng.bernoulli(h0)
    v1 = decode(model, h0)
    h1 = encode(model, v1)
    b = batch.shape[0]
    dw = (linalg.matmul_tn(batch, h0) - linalg.matmul_tn(v1, h1)) / b
    dvb = np.mean(batch - v1, axis=0)
    dhb = np.mean(h0 - h1, axis=0)
    return dw, dvb, dhb


def cd1_update(model: RbmModel, batch: np.ndarray, cfg: CdConfig, rng: Rng | None = None) -> RbmModel:
    """One CD-1 parameter update; returns the new model."""
    dw, dvb, dhb = cd1_delta(model, batch, cfg, rng)
    step = cfg.zeta * cfg.learning_rate
    return replace(
        model,
        weights=model.weights + step * dw,
        visible_bias=model.visible_bias + step * dvb,
        hidden_bias=model.hidden_bias + step * dhb,
    )
