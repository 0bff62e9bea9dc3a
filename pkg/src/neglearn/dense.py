"""One-hidden-layer dense autoencoder trained by backpropagation.

Forward pass: latent = sigmoid(x @ We + be), xhat = act(latent @ Wd + bd)
where ``act`` is sigmoid or identity.  Gradients are of the batch-mean
per-element squared reconstruction error, multiplied by a sign: +1 for
descent on data the model should reconstruct, -1 for ascent on data it
should fail on.  Updates go through vanilla SGD or Adam.

Model and optimizer-state values are immutable; steps return new ones.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import linalg
from .errors import NumericError, ShapeError
from .rng import Rng

SIGMOID = "sigmoid"
IDENTITY = "identity"


@dataclass(frozen=True)
class DenseAutoencoder:
    encoder_weights: np.ndarray  # (n_in, n_hidden)
    encoder_bias: np.ndarray     # (n_hidden,)
    decoder_weights: np.ndarray  # (n_hidden, n_in)
    decoder_bias: np.ndarray     # (n_in,)
    output_activation: str = SIGMOID

    def __post_init__(self):
        n_in, n_hidden = self.encoder_weights.shape
        if self.encoder_bias.shape != (n_hidden,):
            raise ShapeError("encoder_bias length must equal hidden width")
        if self.decoder_weights.shape != (n_hidden, n_in):
            raise ShapeError("decoder_weights must be (n_hidden, n_in)")
        if self.decoder_bias.shape != (n_in,):
            raise ShapeError("decoder_bias length must equal input width")
        if self.output_activation not in (SIGMOID, IDENTITY):
            raise ValueError(f"unknown output_activation {self.output_activation!r}")
        for p in self.params():
            if not np.isfinite(p).all():
                raise NumericError("model parameters must be finite")

    @property
    def n_in(self) -> int:
        return self.encoder_weights.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.encoder_weights.shape[1]

    def params(self):
        return (self.encoder_weights, self.encoder_bias,
                self.decoder_weights, self.decoder_bias)


@dataclass(frozen=True)
class Grads:
    """Per-parameter gradient (or moment) tensors, shapes mirror the model."""

    encoder_weights: np.ndarray
    encoder_bias: np.ndarray
    decoder_weights: np.ndarray
    decoder_bias: np.ndarray

    def params(self):
        return (self.encoder_weights, self.encoder_bias,
                self.decoder_weights, self.decoder_bias)

    def scaled(self, factor: float) -> "Grads":
        return Grads(*(factor * p for p in self.params()))


@dataclass(frozen=True)
class OptimizerConfig:
    kind: str = "sgd"  # "sgd" or "adam"
    learning_rate: float = 0.001
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8

    def __post_init__(self):
        if self.kind not in ("sgd", "adam"):
            raise ValueError(f"unknown optimizer kind {self.kind!r}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not (0 <= self.adam_beta1 < 1 and 0 <= self.adam_beta2 < 1):
            raise ValueError("Adam betas must lie in [0, 1)")
        if self.adam_epsilon <= 0:
            raise ValueError("adam_epsilon must be > 0")


@dataclass(frozen=True)
class OptimizerState:
    """Adam first/second-moment accumulators and step counter."""

    m: Grads
    v: Grads
    step: int = 0


def zero_state(model: DenseAutoencoder) -> OptimizerState:
    zeros = Grads(*(np.zeros_like(p) for p in model.params()))
    return OptimizerState(m=zeros, v=zeros, step=0)


def init_dense(n_in: int, n_hidden: int, rng: Rng,
               output_activation: str = SIGMOID) -> DenseAutoencoder:
    """Glorot-uniform weights, zero biases."""
    if n_in < 1 or n_hidden < 1:
        raise ValueError("layer sizes must be >= 1")
    r = np.sqrt(6.0 / (n_in + n_hidden))
    return DenseAutoencoder(
        encoder_weights=rng.uniform(n_in, n_hidden, -r, r),
        encoder_bias=np.zeros(n_hidden),
        decoder_weights=rng.uniform(n_hidden, n_in, -r, r),
        decoder_bias=np.zeros(n_in),
        output_activation=output_activation,
    )


def forward(model: DenseAutoencoder, x: np.ndarray):
    """Return (latent, xhat) for a batch of rows."""
    if x.ndim != 2 or x.shape[1] != model.n_in:
        raise ShapeError(f"forward: expected {model.n_in} columns, got shape {x.shape}")
    latent = linalg.sigmoid(linalg.matmul(x, model.encoder_weights) + model.encoder_bias)
    z = linalg.matmul(latent, model.decoder_weights) + model.decoder_bias
    xhat = linalg.sigmoid(z) if model.output_activation == SIGMOID else z
    return latent, xhat


def gradients(model: DenseAutoencoder, x: np.ndarray, sign: int = 1) -> Grads:
    """Gradients of batch-mean squared error, multiplied by ``sign``."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    latent, xhat = forward(model, x)
    b, n = x.shape
    # d(loss)/d(xhat) for loss = sum((xhat-x)^2) / (b*n)
    dxhat = (2.0 / (b * n)) * (xhat - x)
    if model.output_activation == SIGMOID:
        dz2 = dxhat * xhat * (1.0 - xhat)
    else:
        dz2 = dxhat
    g_dec_w = linalg.matmul_tn(latent, dz2)
    g_dec_b = np.sum(dz2, axis=0)
    dlatent = linalg.matmul_nt(dz2, model.decoder_weights)
    dz1 = dlatent * latent * (1.0 - latent)
    g_enc_w = linalg.matmul_tn(x, dz1)
    g_enc_b = np.sum(dz1, axis=0)
    g = Grads(g_enc_w, g_enc_b, g_dec_w, g_dec_b)
    return g if sign == 1 else g.scaled(-1.0)


def loss(model: DenseAutoencoder, x: np.ndarray) -> float:
    """Batch-mean per-element squared reconstruction error."""
    _, xhat = forward(model, x)
    return linalg.mse(xhat, x)


def sgd_step(model: DenseAutoencoder, grads: Grads, cfg: OptimizerConfig) -> DenseAutoencoder:
    """theta' = theta - lr * g."""
    lr = cfg.learning_rate
    new = [p - lr * g for p, g in zip(model.params(), grads.params())]
    return _rebuild(model, new)


def adam_step(model: DenseAutoencoder, grads: Grads, cfg: OptimizerConfig,
              state: OptimizerState):
    """Standard Adam with bias correction; returns (model, state)."""
    t = state.step + 1
    b1, b2, eps = cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon
    new_m, new_v, new_p = [], [], []
    for p, g, m, v in zip(model.params(), grads.params(),
                          state.m.params(), state.v.params()):
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * (g * g)
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        new_m.append(m)
        new_v.append(v)
        new_p.append(p - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + eps))
    new_state = OptimizerState(m=Grads(*new_m), v=Grads(*new_v), step=t)
    return _rebuild(model, new_p), new_state


def _rebuild(model: DenseAutoencoder, params) -> DenseAutoencoder:
    return replace(
        model,
        encoder_weights=params[0], encoder_bias=params[1],
        decoder_weights=params[2], decoder_bias=params[3],
    )
